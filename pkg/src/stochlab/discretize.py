"""Tridiagonal finite-difference realizations on truncated grids.

The right end of every grid is a Dirichlet node, so increasing the
truncation radius realizes the minimal (exhaustion) objects.  The left end
depends on the operator: a reflecting pole, a Dirichlet node, or, for
operators on the whole line, a second Dirichlet node at ``-R``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.special import roots_legendre

from .model import OperatorSpec


@dataclass(frozen=True)
class Grid1D:
    r_min: float
    R: float
    h: float

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("grid spacing must be positive")
        if not self.R > self.r_min + 10 * self.h:
            raise ValueError("grid needs at least 10 interior nodes")
        span = (self.R - self.r_min) / self.h
        if abs(span - round(span)) > 1e-6 * max(1.0, span):
            raise ValueError(f"(R - r_min)/h = {span} is not an integer")

    @property
    def n(self) -> int:
        """Number of intervals; nodes are indexed 0..n."""
        return int(round((self.R - self.r_min) / self.h))

    @property
    def nodes(self) -> np.ndarray:
        return self.r_min + self.h * np.arange(self.n + 1)

    @property
    def mirrored(self) -> bool:
        return bool(np.isclose(self.r_min, -self.R))

    def index_of(self, r) -> int:
        """Nearest node index to position ``r``."""
        return int(np.clip(round((r - self.r_min) / self.h), 0, self.n))

    def window(self, lo, hi) -> np.ndarray:
        x = self.nodes
        return np.flatnonzero((x >= lo - 1e-12) & (x <= hi + 1e-12))


def make_grid(spec: OperatorSpec, R: float, h: float) -> Grid1D:
    """Grid on ``[r_min, R]``, or on ``[-R, R]`` for whole-line operators."""
    r_min = -R if spec.entire_line else spec.coeffs.r_min
    return Grid1D(float(r_min), float(R), float(h))


def refine(grid: Grid1D, factor: int) -> Grid1D:
    if int(factor) != factor or factor < 2:
        raise ValueError("refinement factor must be an integer >= 2")
    return Grid1D(grid.r_min, grid.R, grid.h / factor)


def exhaust(grid: Grid1D, schedule) -> list[Grid1D]:
    """Truncations of ``grid`` at each radius in ``schedule``.

    Mirrored (whole-line) grids stay mirrored, so their left end moves too.
    """
    schedule = [float(R) for R in schedule]
    if not schedule:
        raise ValueError("empty exhaustion schedule")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be strictly increasing")
    if grid.mirrored:
        return [Grid1D(-R, R, grid.h) for R in schedule]
    if schedule[0] <= grid.r_min:
        raise ValueError("every truncation radius must exceed r_min")
    return [Grid1D(grid.r_min, R, grid.h) for R in schedule]


def log_bernoulli(z):
    """``log(z / expm1(z))``, stable for large ``|z|``."""
    z = np.asarray(z, dtype=float)
    out = np.zeros_like(z)
    small = np.abs(z) < 1e-8
    big = z > 30
    neg = z < -30
    mid = ~(small | big | neg)
    out[small] = -z[small] / 2
    zm = z[mid]
    out[mid] = np.log(zm / np.expm1(zm))
    zb = z[big]
    out[big] = np.log(zb) - zb
    zn = z[neg]
    out[neg] = np.log(-zn) - np.log1p(-np.exp(zn))
    return out


def bernoulli(z):
    return np.exp(log_bernoulli(z))


def _pole_factor(spec, r0, a0):
    """``lim r -> r0`` of ``-(r - r0) b / a`` for a drift singular at the pole."""
    eps = 1e-9
    r = np.array([r0 + eps])
    c = spec.coeffs
    return float(-(eps * c.b(r) / c.a(r))[0])


def cell_log_weights(spec: OperatorSpec, grid: Grid1D) -> np.ndarray:
    """Log of the quadrature weight ``~ v(r_i) h`` attached to each node.

    Interior nodes get ``v h``; an end node gets the integral of ``v`` over its
    half cell, which stays positive at a pole where ``v`` vanishes.
    """
    r = grid.nodes
    with np.errstate(divide="ignore"):
        logw = spec.coeffs.log_v(r) + np.log(grid.h)
    gx, gw = roots_legendre(8)
    for end, sign in ((0, 1.0), (grid.n, -1.0)):
        a0 = r[end]
        pts = a0 + sign * (gx + 1) * grid.h / 4
        lv = spec.coeffs.log_v(pts)
        top = np.max(lv)
        logw[end] = top + np.log(np.sum(gw * np.exp(lv - top)) * grid.h / 4)
    return logw


@dataclass(frozen=True)
class DiscreteOperator:
    """Tridiagonal stencil of ``rho (-a D2 + b D1)`` on the active nodes.

    ``active`` holds the node indices that are unknowns; Dirichlet nodes are
    excluded.  ``sub[k]`` couples active node ``active[k]`` to its left
    neighbour and ``sup[k]`` to its right neighbour.
    """

    grid: Grid1D
    active: np.ndarray
    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    scheme: str
    upwind_mask: np.ndarray
    boundary: dict
    log_w: np.ndarray = field(repr=False)
    label: str = ""

    @property
    def size(self) -> int:
        return len(self.active)

    def matrix(self) -> sparse.csr_matrix:
        """Active-block matrix (Dirichlet values are zero)."""
        return sparse.diags([self.sub[1:], self.diag, self.sup[:-1]], [-1, 0, 1],
                            format="csr")

    def apply(self, u) -> np.ndarray:
        """Apply the stencil to a full grid function; returns active rows.

        Unlike ``matrix() @ u[active]`` this uses the actual values at the
        boundary nodes, so it measures ``P u`` for functions that do not
        vanish at the truncation.
        """
        u = np.asarray(u, dtype=float)
        i = self.active
        left = np.where(i - 1 >= 0, u[np.maximum(i - 1, 0)], 0.0)
        right = u[np.minimum(i + 1, self.grid.n)]
        if self.boundary["left"] == "reflecting":
            left = left.copy()
            left[0] = 0.0
        return self.sub * left + self.diag * u[i] + self.sup * right

    def to_active(self, u_full) -> np.ndarray:
        return np.asarray(u_full, dtype=float)[self.active]

    def to_full(self, u_active) -> np.ndarray:
        out = np.zeros(self.grid.n + 1)
        out[self.active] = u_active
        return out

    def check_m_matrix(self) -> bool:
        return bool(np.all(self.diag > 0) and np.all(self.sub <= 0) and np.all(self.sup <= 0))

    def row_sums(self) -> np.ndarray:
        return self.sub + self.diag + self.sup

    def weighted_adjoint(self) -> "DiscreteOperator":
        """The operator ``W^{-1} A^T W`` with ``W = diag(weights)``.

        Its action on the constant function gives weighted column sums of
        ``A``; solves with it integrate kernels against ``v`` without ever
        forming ``v`` itself (``v`` may be ``exp(r**3)``).
        """
        lw = self.log_w[self.active]
        n = self.size
        sub = np.zeros(n)
        sup = np.zeros(n)
        # (W^-1 A^T W)_{k,k+1} = A_{k+1,k} w_{k+1} / w_k
        with np.errstate(divide="ignore"):
            sup[:-1] = -np.exp(np.log(-self.sub[1:]) + lw[1:] - lw[:-1])
            sub[1:] = -np.exp(np.log(-self.sup[:-1]) + lw[:-1] - lw[1:])
        return DiscreteOperator(self.grid, self.active, sub, self.diag.copy(), sup,
                                self.scheme, self.upwind_mask, dict(self.boundary, adjoint=True),
                                self.log_w, self.label + "^*")


def assemble(spec: OperatorSpec, grid: Grid1D, fallback: str = "fitted") -> DiscreteOperator:
    """Build the tridiagonal operator for ``spec`` on ``grid``.

    Central differences are used at nodes where ``h |b| <= 2 a``.  At other
    nodes the drift is upwinded; ``fallback="fitted"`` (default) uses the
    exponentially fitted upwind stencil, ``"first_order"`` the plain
    one-sided difference.  Both keep the M-matrix sign pattern.
    """
    if fallback not in ("fitted", "first_order"):
        raise ValueError(f"unknown upwind fallback {fallback!r}")
    r = grid.nodes
    h = grid.h
    lb = spec.coeffs.left_boundary
    reflecting = lb == "regular_reflecting" and not grid.mirrored
    start = 0 if reflecting else 1
    active = np.arange(start, grid.n)

    c = spec.coeffs
    x = r[active]
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.asarray(c.a(x), dtype=float)
        b = np.asarray(c.b(x), dtype=float)
        rho = np.asarray(spec.rho(x), dtype=float)
    if np.any(~np.isfinite(rho)) or np.any(rho <= 0):
        raise ValueError("rho is not finite and positive on the grid")
    if np.any(~np.isfinite(a)) or np.any(a <= 0):
        raise ValueError("second-order coefficient must be positive on the grid")

    interior = np.ones(len(active), dtype=bool)
    if reflecting:
        interior[0] = False
    if np.any(~np.isfinite(b[interior])):
        raise ValueError("drift coefficient has a pole inside the domain")

    sub = np.zeros(len(active))
    sup = np.zeros(len(active))
    pe = np.zeros(len(active))
    pe[interior] = b[interior] * h / a[interior]
    upwind = interior & (np.abs(pe) > 2.0)
    central = interior & ~upwind

    k = central
    # |Pe| <= 2 makes both nonpositive; the clamp only removes round-off at |Pe| = 2
    sub[k] = np.minimum(-a[k] / h**2 - b[k] / (2 * h), 0.0)
    sup[k] = np.minimum(-a[k] / h**2 + b[k] / (2 * h), 0.0)
    k = upwind
    if fallback == "fitted":
        sub[k] = -(a[k] / h**2) * bernoulli(-pe[k])
        sup[k] = -(a[k] / h**2) * bernoulli(pe[k])
    else:
        bp = np.maximum(b[k], 0.0)
        bm = np.minimum(b[k], 0.0)
        sub[k] = -a[k] / h**2 - bp / h
        sup[k] = -a[k] / h**2 + bm / h

    boundary = {"left": "reflecting" if reflecting else "dirichlet", "right": "dirichlet"}
    if reflecting:
        with np.errstate(divide="ignore", invalid="ignore"):
            b0 = float(c.b(np.array([r[0]]))[0])
        pole = 0.0 if np.isfinite(b0) else _pole_factor(spec, r[0], a[0])
        boundary["pole_factor"] = pole
        sup[0] = -2.0 * a[0] * (1.0 + pole) / h**2
    diag = -(sub + sup)
    sub *= rho
    sup *= rho
    diag *= rho

    op = DiscreteOperator(grid, active, sub, diag, sup,
                          "upwind" if upwind.any() else "central", upwind,
                          boundary, cell_log_weights(spec, grid), spec.label)
    if not op.check_m_matrix():
        raise AssertionError("assembled operator violates the M-matrix sign pattern")
    return op
