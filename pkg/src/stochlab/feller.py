"""Feller's explosion test at ``+inf`` for the diffusion generated by ``-P``.

The generator ``L = rho a u'' - rho b u'`` has scale density
``s'(r) = exp(int_c^r b/a)`` and speed density ``m'(r) = 1/(rho a s')``.
When ``s(inf) < inf`` the diffusion explodes iff

    kappa = int_c^inf (s(inf) - s(x)) m'(x) dx < inf.

Writing ``g = (s(inf) - s) / s'`` the integrand is ``g / (rho a)``, and ``g``
solves ``g' = -1 - (b/a) g``, which is stable when integrated towards
smaller ``x``.  Nothing of size ``exp(r**3)`` is ever formed.  When
``s(inf) = inf`` the boundary is not attracting and the test returns
``conservative`` without quadrature.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import roots_legendre

from .model import OperatorSpec
from .semigroup import MassCurve, dichotomy_check

BAND = 0.1  # inconclusive half-width around the critical log-log exponent -1


@dataclass
class FellerReport:
    nodes: np.ndarray
    log_scale_density: np.ndarray
    log_speed_density: np.ndarray
    kappa: float
    verdict: str
    meta: dict = field(default_factory=dict)

    @property
    def scale_density(self) -> np.ndarray:
        with np.errstate(over="ignore", under="ignore"):
            return np.exp(self.log_scale_density)

    @property
    def speed_density(self) -> np.ndarray:
        with np.errstate(over="ignore", under="ignore"):
            return np.exp(self.log_speed_density)

    @property
    def explosive(self) -> bool:
        return self.verdict == "explosive"


def _b_over_a(spec, x):
    c = spec.coeffs
    x = np.asarray(x, dtype=float)
    return np.asarray(c.b(x), dtype=float) / np.asarray(c.a(x), dtype=float)


def _log_scale(spec, nodes):
    """``int_c^r b/a`` at every node, ``c = nodes[0]``, by Gauss-Legendre cells."""
    gx, gw = roots_legendre(8)
    lo, hi = nodes[:-1, None], nodes[1:, None]
    pts = (lo + hi) / 2 + (hi - lo) / 2 * gx[None, :]
    cells = ((hi - lo)[:, 0] / 2) * (_b_over_a(spec, pts) @ gw)
    return np.concatenate([[0.0], np.cumsum(cells)])


def _loglog_slope(x, logy):
    return float(np.polyfit(np.log(x), logy, 1)[0])


def feller_test(spec: OperatorSpec, c: float = 1.0, R_quad: float = 1e3,
                count: int = 2001) -> FellerReport:
    """Classify explosion at ``+inf`` from the Feller integral.

    Parameters
    ----------
    spec : OperatorSpec
    c : float
        Interior anchor; the integral runs over ``[c, inf)``.
    R_quad : float
        End of the explicit quadrature; the remainder is extrapolated from
        the log-log slope of the integrand over ``[R_quad/10, R_quad]``.
    count : int
        Number of sample nodes (log-spaced when ``c > 0``).

    Returns
    -------
    FellerReport
        ``verdict`` is ``explosive`` iff ``kappa`` is finite, ``conservative``
        when it diverges and ``inconclusive`` when the fitted exponent lies
        within ``BAND`` of ``-1``.
    """
    if not R_quad > max(c, 0) * 10 or R_quad <= 0:
        raise ValueError("R_quad must exceed 10 * max(c, 0) and be positive")
    if c > 0:
        nodes = np.geomspace(c, R_quad, count)
    else:
        nodes = np.unique(np.concatenate([np.linspace(c, R_quad / 10, count // 2),
                                          np.geomspace(R_quad / 10, R_quad, count // 2)]))
    x = nodes
    a = np.asarray(spec.coeffs.a(x), dtype=float)
    rho = np.asarray(spec.rho(x), dtype=float)
    if np.any(~np.isfinite(rho)) or np.any(rho <= 0):
        raise ValueError("rho must be finite and positive on the quadrature nodes")
    log_s = _log_scale(spec, x)
    log_m = -np.log(rho) - np.log(a) - log_s
    meta = {"c": float(c), "R_quad": float(R_quad)}

    # does s(inf) converge?  log-log exponent of s' is x b/a in the far field
    far = x >= R_quad / 10
    scale_exp = float(np.mean(x[far] * _b_over_a(spec, x[far])))
    meta["scale_exponent"] = scale_exp
    if scale_exp > -1 + BAND:
        meta["reason"] = "s(inf) = inf: the right end is not attracting"
        return FellerReport(x, log_s, log_m, np.inf, "conservative", meta)
    if scale_exp >= -1 - BAND:
        meta["reason"] = "scale exponent inside the inconclusive band"
        return FellerReport(x, log_s, log_m, np.nan, "inconclusive", meta)

    # g = (s(inf) - s) / s' from the far end; the start value is the
    # power-law tail and its error is damped on the way in
    x_far = 10 * R_quad
    q = float(x_far * _b_over_a(spec, np.array([x_far]))[0])
    g_far = x_far / (-q - 1)

    def coef(t):
        tt = np.array([t])
        ba = float(_b_over_a(spec, tt)[0])
        inv = 1.0 / (float(spec.rho(tt)[0]) * float(spec.coeffs.a(tt)[0]))
        return ba, inv

    def rhs(t, y):
        ba, inv = coef(t)
        return [-1.0 - ba * y[0], -inv * y[0]]

    def jac(t, y):
        ba, inv = coef(t)
        return [[-ba, 0.0], [-inv, 0.0]]

    sol = integrate.solve_ivp(rhs, (x_far, x[0]), [g_far, 0.0], method="Radau", jac=jac,
                              t_eval=np.concatenate([[x_far], x[::-1]]),
                              rtol=1e-9, atol=1e-14)
    if not sol.success:
        meta["reason"] = f"ODE integration failed: {sol.message}"
        return FellerReport(x, log_s, log_m, np.nan, "inconclusive", meta)
    g = sol.y[0, 1:][::-1]
    acc = sol.y[1, 1:][::-1]  # int_x^{x_far} g/(rho a)
    integrand = g / (rho * a)
    kappa_core = float(acc[0] - acc[-1])  # over [c, R_quad]
    with np.errstate(divide="ignore", invalid="ignore"):
        lint = np.log(integrand)
    good = far & np.isfinite(lint)
    slope = _loglog_slope(x[good], lint[good]) if good.sum() >= 3 else np.nan
    meta.update(integrand_exponent=slope, kappa_core=kappa_core)
    if not np.isfinite(slope):
        return FellerReport(x, log_s, log_m, np.nan, "inconclusive", meta)
    if slope < -1 - BAND:
        tail = float(integrand[-1] * x[-1] / (-slope - 1))
        meta["tail"] = tail
        return FellerReport(x, log_s, log_m, kappa_core + tail, "explosive", meta)
    if slope > -1 + BAND:
        return FellerReport(x, log_s, log_m, np.inf, "conservative", meta)
    return FellerReport(x, log_s, log_m, np.nan, "inconclusive", meta)


def oracle_agree(report: FellerReport, curve, t: float = 1.0, tol: float = 5e-3,
                 window=None) -> bool | None:
    """Whether the Feller verdict and the mass dichotomy classify alike.

    ``curve`` is a MassCurve (classified at time ``t``) or a dichotomy
    verdict string.  An inconclusive oracle never blocks: ``None`` is
    returned and the caller reports it separately.
    """
    verdict = curve
    if isinstance(curve, MassCurve):
        verdict = dichotomy_check(curve, t, tol, window)
    if report.verdict == "inconclusive":
        return None
    if report.verdict == "explosive":
        return verdict == "all_below_one"
    return verdict == "all_equal_one"
