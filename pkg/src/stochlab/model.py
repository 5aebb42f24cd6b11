"""Operator specifications for one-dimensional model operators.

An operator acts on functions of one variable ``r`` as

    P u = rho(r) * ( -a(r) u'' + b(r) u' )

with a reference measure ``v(r) dr``.  There is no zeroth-order term, so
``P 1 = 0`` for every specification built here.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

Fn = Callable[[np.ndarray], np.ndarray]

LEFT_BOUNDARIES = ("regular_reflecting", "dirichlet_at_r_min", "entire_line")
SYMMETRY_TOL = 1e-10


def _ones(r):
    return np.ones_like(np.asarray(r, dtype=float))


def _zeros(r):
    return np.zeros_like(np.asarray(r, dtype=float))


@dataclass(frozen=True)
class CoefficientField:
    """Coefficients of ``-a u'' + b u'`` and the measure density ``v``.

    ``v`` is carried through its logarithm so that rapidly growing
    densities (``exp(r**3)``) never overflow; use :meth:`v` for the raw
    density when it is known to be representable.
    """

    a: Fn
    b: Fn
    log_v: Fn
    r_min: float = 0.0
    left_boundary: str = "regular_reflecting"
    a_prime: Fn = _zeros
    log_v_prime: Fn | None = None

    def __post_init__(self):
        if self.left_boundary not in LEFT_BOUNDARIES:
            raise ValueError(f"unknown left boundary {self.left_boundary!r}")

    def v(self, r):
        with np.errstate(over="ignore"):
            return np.exp(self.log_v(np.asarray(r, dtype=float)))

    def dlog_v(self, r):
        r = np.asarray(r, dtype=float)
        if self.log_v_prime is not None:
            return self.log_v_prime(r)
        step = 1e-5 * np.maximum(1.0, np.abs(r))
        return (self.log_v(r + step) - self.log_v(r - step)) / (2 * step)


@dataclass(frozen=True)
class OperatorSpec:
    """A coefficient field together with a positive multiplier ``rho``."""

    coeffs: CoefficientField
    rho: Fn = _ones
    label: str = "spec"
    # multipliers applied by ``rescale``; kept for provenance only
    history: tuple = field(default=(), compare=False)

    @property
    def entire_line(self):
        return self.coeffs.left_boundary == "entire_line"

    def apply(self, u, du, d2u, r):
        """Evaluate ``P u`` from pointwise derivative samples."""
        r = np.asarray(r, dtype=float)
        c = self.coeffs
        return self.rho(r) * (-c.a(r) * d2u + c.b(r) * du)


@dataclass(frozen=True)
class SkewSpec:
    first: OperatorSpec
    second: OperatorSpec

    @property
    def label(self):
        return f"{self.first.label} x {self.second.label}"


# ---------------------------------------------------------------------------
# presets

def _smootherstep(s):
    s = np.clip(s, 0.0, 1.0)
    return s * s * s * (s * (6 * s - 15) + 10)


def _smootherstep_prime(s):
    inside = (s > 0) & (s < 1)
    s = np.clip(s, 0.0, 1.0)
    return np.where(inside, 30 * s * s * (s - 1) ** 2, 0.0)


def _euclidean_radial(n):
    if int(n) != n or n < 3:
        raise ValueError("euclidean_radial needs an integer dimension n >= 3")
    n = int(n)

    def b(r):
        with np.errstate(divide="ignore"):
            return -(n - 1) / np.asarray(r, dtype=float)

    def log_v(r):
        with np.errstate(divide="ignore"):
            return (n - 1) * np.log(np.asarray(r, dtype=float))

    def log_v_prime(r):
        with np.errstate(divide="ignore"):
            return (n - 1) / np.asarray(r, dtype=float)

    coeffs = CoefficientField(a=_ones, b=b, log_v=log_v, r_min=0.0,
                              left_boundary="regular_reflecting",
                              log_v_prime=log_v_prime)
    return OperatorSpec(coeffs, label=f"euclidean_radial(n={n})")


def _log_sinh(r):
    r = np.abs(np.asarray(r, dtype=float))
    with np.errstate(divide="ignore"):
        return r + np.log1p(-np.exp(-2 * r)) - np.log(2.0)


def _hyperbolic_radial(n):
    if int(n) != n or n < 2:
        raise ValueError("hyperbolic_radial needs an integer dimension n >= 2")
    n = int(n)

    def coth(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 / np.tanh(r)

    coeffs = CoefficientField(
        a=_ones,
        b=lambda r: -(n - 1) * coth(r),
        log_v=lambda r: (n - 1) * _log_sinh(r),
        r_min=0.0,
        left_boundary="regular_reflecting",
        log_v_prime=lambda r: (n - 1) * coth(r),
    )
    return OperatorSpec(coeffs, label=f"hyperbolic_radial(n={n})")


def _rapid_model(alpha):
    if not alpha > 0:
        raise ValueError("rapid_model needs alpha > 0")
    alpha = float(alpha)

    def log_v(r):
        r = np.asarray(r, dtype=float)
        return _smootherstep(r) * np.abs(r) ** alpha

    def log_v_prime(r):
        r = np.abs(np.asarray(r, dtype=float))
        return (_smootherstep_prime(r) * r ** alpha
                + _smootherstep(r) * alpha * r ** (alpha - 1))

    coeffs = CoefficientField(
        a=_ones,
        b=lambda r: -log_v_prime(r),
        log_v=log_v,
        r_min=0.0,
        left_boundary="regular_reflecting",
        log_v_prime=log_v_prime,
    )
    return OperatorSpec(coeffs, label=f"rapid_model(alpha={alpha:g})")


def _drifted_line(beta):
    beta = float(beta)
    coeffs = CoefficientField(
        a=_ones,
        b=lambda r: np.full_like(np.asarray(r, dtype=float), beta),
        log_v=lambda r: -beta * np.asarray(r, dtype=float),
        r_min=-np.inf,
        left_boundary="entire_line",
        log_v_prime=lambda r: np.full_like(np.asarray(r, dtype=float), -beta),
    )
    return OperatorSpec(coeffs, label=f"drifted_line(beta={beta:g})")


PRESETS = {
    "euclidean_radial": _euclidean_radial,
    "hyperbolic_radial": _hyperbolic_radial,
    "rapid_model": _rapid_model,
    "drifted_line": _drifted_line,
}


def preset(name: str, params: Sequence[float] = ()) -> OperatorSpec:
    """Instantiate a catalog operator.

    Parameters
    ----------
    name : str
        One of ``euclidean_radial``, ``hyperbolic_radial``, ``rapid_model``,
        ``drifted_line``.
    params : sequence of float
        Exactly one parameter: the dimension ``n``, the exponent ``alpha``
        or the drift ``beta``.
    """
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    params = list(params)
    if len(params) != 1:
        raise ValueError(f"preset {name!r} takes exactly one parameter, got {params}")
    return factory(params[0])


def probe_nodes(spec: OperatorSpec, upper=100.0, count=2001):
    """Sample nodes used to validate pointwise conditions on ``spec``."""
    lo = -upper if spec.entire_line else spec.coeffs.r_min
    nodes = np.linspace(lo, upper, count)
    if spec.coeffs.left_boundary != "entire_line":
        nodes = nodes[1:]  # the pole itself may be singular
    return nodes


def rescale(spec: OperatorSpec, rho: Fn | float, nodes=None, label=None) -> OperatorSpec:
    """Return ``rho * P``; the coefficient field is shared, not copied."""
    if np.isscalar(rho):
        const = float(rho)
        rho_fn = lambda r, c=const: np.full_like(np.asarray(r, dtype=float), c)  # noqa: E731
    else:
        rho_fn = rho
    if nodes is None:
        nodes = probe_nodes(spec)
    samples = np.asarray(rho_fn(np.asarray(nodes, dtype=float)), dtype=float)
    if not np.all(np.isfinite(samples)) or np.any(samples <= 0):
        raise ValueError("rho must be finite and strictly positive on the sampled nodes")
    base_rho = spec.rho

    def combined(r):
        return base_rho(r) * rho_fn(r)

    return replace(spec, rho=combined,
                   label=label or f"{spec.label}*rho",
                   history=spec.history + (rho_fn,))


def symmetric_residual(spec: OperatorSpec, nodes=None):
    """Pointwise ``b + a' + a * v'/v``; zero iff ``P = -(1/v)(a v u')'``."""
    if nodes is None:
        nodes = probe_nodes(spec)
    r = np.asarray(nodes, dtype=float)
    c = spec.coeffs
    return c.b(r) + c.a_prime(r) + c.a(r) * c.dlog_v(r)


def symmetric_compatible(spec: OperatorSpec, nodes=None, tol=SYMMETRY_TOL) -> bool:
    res = symmetric_residual(spec, nodes)
    return bool(np.all(np.isfinite(res)) and np.max(np.abs(res)) < tol)


def with_density(spec: OperatorSpec, log_v: Fn, log_v_prime: Fn | None = None,
                 label=None) -> OperatorSpec:
    """Swap the reference measure while keeping ``a`` and ``b``."""
    coeffs = replace(spec.coeffs, log_v=log_v, log_v_prime=log_v_prime)
    return replace(spec, coeffs=coeffs, label=label or f"{spec.label}[v*]")
