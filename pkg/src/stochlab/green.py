"""Green functions, Green potentials and the L1-Liouville verdict.

Normalization: ``G`` is the kernel of ``P^{-1}`` against ``v dr``, so
``u(x) = int G(x, y) f(y) v(y) dy`` solves ``P u = f``.

Three routes compute ``G(., y)``:

* ``green_via_time`` integrates the heat kernel in time (minimal Green
  function of the truncated problem, with an exponential tail fit);
* ``green_closed_form`` uses the scale integrals of a symmetric operator
  (minimal Green function of the untruncated problem, or of the truncation
  when ``truncated=True``);
* ``green_direct`` solves ``A G = delta`` on the grid, which is the
  ``T -> infinity`` limit of the time route for implicit Euler.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.linalg import solve_banded
from scipy.special import logsumexp, roots_legendre

from .discretize import DiscreteOperator, Grid1D, assemble, exhaust, make_grid
from .errors import CriticalSpecError
from .model import OperatorSpec, symmetric_compatible
from .semigroup import Stepper, delta

EPS_CRIT = 0.1        # half-width of the inconclusive band around tail exponent 1
GROW_L1 = 0.05        # relative increment per doubling that signals divergence
SATURATE_L1 = 0.005   # relative increment per doubling that signals convergence
OVERFLOW_GUARD = 1e150


@dataclass
class GreenTable:
    grid: Grid1D
    y_index: int
    values: np.ndarray
    route: str
    tail_meta: dict = field(default_factory=dict)
    verdict: str | None = None
    label: str = ""

    @property
    def y(self) -> float:
        return float(self.grid.nodes[self.y_index])


@dataclass
class GreenPotential:
    grid: Grid1D
    mu: np.ndarray
    values: np.ndarray
    finite: bool
    route: str = "closed_form"
    meta: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# scale integrals

def _log_integrand(spec: OperatorSpec):
    c = spec.coeffs

    def f(t):
        t = np.asarray(t, dtype=float)
        return -np.log(c.a(t)) - c.log_v(t)
    return f


def _tail_behaviour(logf, start, direction=1.0, decades=2.0):
    """Classify ``int_start^{direction*inf} exp(logf)`` by its far-field slope.

    Returns ``(converges, exponent)`` where ``exponent`` is the fitted
    log-log slope of the integrand over the last decade sampled.  An
    integrand decaying faster than any power returns ``-inf``.
    """
    base = max(abs(start), 1.0)
    pts = direction * base * np.logspace(decades - 1, decades, 9)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lf = logf(pts)
    if np.all(lf == -np.inf) or (np.isfinite(lf[0]) and lf[-1] - lf[0] < -200):
        return True, -np.inf
    if not np.all(np.isfinite(lf)):
        return False, np.inf
    slope = np.polyfit(np.log(np.abs(pts)), lf, 1)[0]
    if slope < -1 - EPS_CRIT:
        return True, slope
    return False, slope


def _quad_tail(logf, start, direction=1.0):
    """``int_start^{direction*inf} exp(logf)``, assuming it converges."""
    def g(t):
        with np.errstate(over="ignore", under="ignore"):
            return float(np.exp(logf(np.array([t])))[0])
    lo, hi = (start, np.inf) if direction > 0 else (-np.inf, start)
    val, err = integrate.quad(g, lo, hi, limit=400, epsabs=0.0, epsrel=1e-10)
    return val, err


def _cell_integrals(logf, edges, order=8):
    """Gauss-Legendre integrals of ``exp(logf)`` over consecutive cells."""
    gx, gw = roots_legendre(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    pts = (lo + hi) / 2 + (hi - lo) / 2 * gx[None, :]
    with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
        vals = np.exp(logf(pts))
    return ((hi - lo)[:, 0] / 2) * (vals @ gw)


def _cell_integrals_checked(logf, edges, rtol=1e-8):
    coarse = _cell_integrals(logf, edges)
    mids = (edges[:-1] + edges[1:]) / 2
    fine_edges = np.empty(2 * len(edges) - 1)
    fine_edges[0::2] = edges
    fine_edges[1::2] = mids
    fine = _cell_integrals(logf, fine_edges).reshape(-1, 2).sum(axis=1)
    scale = np.maximum(np.abs(fine), 1e-300)
    err = np.abs(fine - coarse) / scale
    return fine, err


@dataclass
class ScaleIntegrals:
    """``S_plus(r) = int_r^inf dt/(a v)`` and ``S_minus(r) = int_left^r dt/(a v)``.

    ``lower`` and ``upper`` give the factors in ``G(x, y) = lower(min) *
    upper(max)``, already normalized by the total scale when both ends are
    finite.  Infinite scale at an end means that end is not attracting.
    """

    nodes: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray
    plus_finite: bool
    minus_finite: bool
    quad_error: float
    plus_exponent: float

    @property
    def critical(self) -> bool:
        return not (self.plus_finite or self.minus_finite)

    def factors(self, s_plus=None, s_minus=None):
        """``(lower, upper)`` at the nodes, or at points with given scale values."""
        if self.critical:
            raise CriticalSpecError("both scale integrals diverge: the operator is critical")
        s_plus = self.s_plus if s_plus is None else s_plus
        s_minus = self.s_minus if s_minus is None else s_minus
        if self.plus_finite and self.minus_finite:
            total = self.s_plus[0] + self.s_minus[0]
            return s_minus / total, s_plus
        if self.plus_finite:
            return np.ones_like(s_plus), s_plus
        return s_minus, np.ones_like(s_minus)


def scale_integrals(spec: OperatorSpec, grid: Grid1D) -> ScaleIntegrals:
    logf = _log_integrand(spec)
    x = grid.nodes
    lb = spec.coeffs.left_boundary
    pole = lb == "regular_reflecting"
    pole_singular = pole and not np.isfinite(spec.coeffs.log_v(np.array([x[0]]))[0])

    cells, err = _cell_integrals_checked(logf, x)
    if pole_singular:
        cells[0] = np.inf
        err[0] = 0.0
    qerr = float(np.max(err[np.isfinite(cells)])) if np.any(np.isfinite(cells)) else 0.0

    plus_ok, plus_exp = _tail_behaviour(logf, x[-1], 1.0)
    if plus_ok:
        tail_plus, _ = _quad_tail(logf, x[-1], 1.0)
        s_plus = tail_plus + np.concatenate([np.cumsum(cells[::-1])[::-1], [0.0]])
    else:
        s_plus = np.full_like(x, np.inf)

    if pole:
        minus_ok = False
        s_minus = np.full_like(x, np.inf)
    elif lb == "dirichlet_at_r_min":
        minus_ok = True
        s_minus = np.concatenate([[0.0], np.cumsum(cells)])
    else:
        minus_ok, _ = _tail_behaviour(logf, x[0], -1.0)
        if minus_ok:
            tail_minus, _ = _quad_tail(logf, x[0], -1.0)
            s_minus = tail_minus + np.concatenate([[0.0], np.cumsum(cells)])
        else:
            s_minus = np.full_like(x, np.inf)
    return ScaleIntegrals(x, s_plus, s_minus, plus_ok, minus_ok, qerr, plus_exp)


# ---------------------------------------------------------------------------
# routes

def green_closed_form(spec: OperatorSpec, y_index: int, grid: Grid1D,
                      truncated: bool = False) -> GreenTable:
    """Closed-form minimal Green function of a symmetric-compatible spec.

    The multiplier enters only through ``G_rho(x, y) = G(x, y) / rho(y)``.
    With ``truncated=True`` the Dirichlet condition at ``grid.R`` (and at
    ``-R`` for whole-line grids) is imposed, which is the object the grid
    routes approximate.
    """
    if not symmetric_compatible(spec):
        raise ValueError("closed-form Green function needs a symmetric-compatible spec")
    sc = scale_integrals(spec, grid)
    if truncated:
        lower, upper = _truncated_factors(sc, spec)
    else:
        lower, upper = sc.factors()
    x = grid.nodes
    lo = np.minimum(np.arange(len(x)), y_index)
    hi = np.maximum(np.arange(len(x)), y_index)
    with np.errstate(invalid="ignore"):
        vals = lower[lo] * upper[hi]
    rho_y = float(spec.rho(np.array([x[y_index]]))[0])
    vals = vals / rho_y
    if truncated:
        vals[-1] = 0.0
        if grid.mirrored or spec.coeffs.left_boundary != "regular_reflecting":
            vals[0] = 0.0
    return GreenTable(grid, y_index, vals, "closed_form",
                      {"quad_rel_error": sc.quad_error, "truncated": truncated},
                      "subcritical", spec.label)


def _truncated_factors(sc: ScaleIntegrals, spec):
    # scale measured from the right Dirichlet node
    s_plus = sc.s_plus - sc.s_plus[-1] if sc.plus_finite else None
    if s_plus is None:
        # recompute the finite part directly from the minus integral
        s_plus = sc.s_minus[-1] - sc.s_minus if sc.minus_finite else None
    if spec.coeffs.left_boundary == "regular_reflecting":
        if s_plus is None:
            raise CriticalSpecError("scale integral diverges on the truncation")
        return np.ones_like(s_plus), s_plus
    # two Dirichlet ends
    if sc.minus_finite:
        s_minus = sc.s_minus - sc.s_minus[0]
    else:
        s_minus = sc.s_plus[0] - sc.s_plus
    if s_plus is None:
        s_plus = s_minus[-1] - s_minus
    total = s_minus[-1]
    return s_minus / total, s_plus


def green_direct(spec: OperatorSpec, grid: Grid1D, y_index: int, op=None) -> GreenTable:
    """Exact discrete Green column ``A^{-1} delta_y`` on the truncated grid."""
    op = op or assemble(spec, grid)
    rhs = op.to_active(delta(op, y_index))
    vals = op.to_full(solve_tridiagonal(op, rhs))
    return GreenTable(grid, y_index, vals, "direct", {}, None, spec.label)


def solve_tridiagonal(op: DiscreteOperator, rhs: np.ndarray) -> np.ndarray:
    ab = np.zeros((3, op.size))
    ab[0, 1:] = op.sup[:-1]
    ab[1] = op.diag
    ab[2, :-1] = op.sub[1:]
    return solve_banded((1, 1), ab, rhs)


def green_via_time(spec: OperatorSpec, grid: Grid1D, y_index: int, T_max: float,
                   dt: float, op=None) -> GreenTable:
    """Time-integrated heat kernel with a fitted exponential tail.

    The running integral is the right-endpoint sum ``dt * sum_n u_n`` of the
    implicit-Euler iterates, which is the quadrature consistent with the
    stepper: as ``T -> infinity`` it tends to ``A^{-1} delta`` exactly.  (The
    trapezoid rule would add a spurious ``dt * u_1 / 2`` next to the source.)
    Beyond ``T_max`` each node is extrapolated as ``k(T) exp(-lam (t - T))``
    with its own decay rate over the last tenth of the run; nodes where that
    rate is not positive fall back to the global rate.  The run stops early
    once the kernel is negligible against the accumulated integral.

    Criticality is read off the log-log slope of ``k(y, y, t)`` over the last
    decade ``[T_max/10, T_max]``: an exponent above ``1 + EPS_CRIT`` means an
    integrable tail (subcritical), below ``1 - EPS_CRIT`` a divergent one
    (critical); anything between is inconclusive.  The verdict is only
    meaningful while ``T_max`` is short against the truncation's relaxation
    time, roughly ``R**2 / 4``.
    """
    if not T_max > 0:
        raise ValueError("T_max must be positive")
    op = op or assemble(spec, grid)
    stepper = Stepper(op, dt)
    n_steps = max(1, int(round(T_max / dt)))
    k_decade = max(1, int(round(0.1 * n_steps)))
    k_late = n_steps - max(1, int(round(0.1 * n_steps)))
    pos_y = int(np.searchsorted(op.active, y_index))

    u = op.to_active(delta(op, y_index))
    peak = float(u[pos_y])
    integral = np.zeros_like(u)
    k_y = {}
    late = None
    step = 0
    block = 1000
    while step < n_steps:
        stop = min(n_steps, step + block)
        for step in range(step + 1, stop + 1):
            u = stepper.step(u)
            integral += dt * u
            if step == k_decade:
                k_y["decade"] = float(u[pos_y])
            if step == k_late:
                late = np.array(u)
        if step < n_steps and np.max(u) <= 1e-15 * np.max(integral):
            break
    finished = step == n_steps
    k_y["T"] = float(u[pos_y])

    lw = op.log_w[op.active]
    lam = np.nan
    tail = np.zeros_like(u)
    if finished and late is not None:
        span = (n_steps - k_late) * dt
        with np.errstate(divide="ignore", invalid="ignore"):
            lam = float((logsumexp(lw, b=late) - logsumexp(lw, b=u)) / span)
            local = np.log(late / u) / span
        if np.isfinite(lam) and lam > 0:
            local = np.where(np.isfinite(local) & (local > 0), local, lam)
            tail = u / local

    values = op.to_full(integral + tail)

    kT = k_y["T"]
    kd = k_y.get("decade", np.nan)
    if not finished or kT <= 1e-300 or kT <= 1e-14 * peak:
        exponent = np.inf
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            exponent = float(np.log(kd / kT) / np.log(n_steps / k_decade))
    if exponent > 1 + EPS_CRIT:
        verdict = "subcritical"
    elif exponent < 1 - EPS_CRIT:
        verdict = "critical"
    else:
        verdict = "inconclusive"
    y_val = float(values[y_index])
    meta = {
        "T_max": T_max,
        "T_run": step * dt,
        "dt": dt,
        "tail_slope": kT,             # d/dT of the running integral at y
        "tail_exponent": exponent,
        "decay_rate": float(lam) if np.isfinite(lam) else None,
        "tail_fraction": float(tail[pos_y] / y_val) if y_val > 0 else None,
    }
    return GreenTable(grid, y_index, values, "time_integrated", meta, verdict, spec.label)


def criticality_closed_form(spec: OperatorSpec, grid: Grid1D) -> str:
    """``subcritical`` iff some scale integral converges (symmetric specs)."""
    sc = scale_integrals(spec, grid)
    return "critical" if sc.critical else "subcritical"


# ---------------------------------------------------------------------------
# potentials

def _as_density(mu, x):
    if callable(mu):
        vals = np.asarray(mu(x), dtype=float)
    else:
        vals = np.asarray(mu, dtype=float)
    if vals.shape != x.shape:
        vals = np.broadcast_to(vals, x.shape).astype(float)
    return vals


def green_potential(spec: OperatorSpec, grid: Grid1D, mu, dt: float = 1e-3,
                    T_max: float = 200.0) -> GreenPotential:
    """``G_mu(x) = int G(x, y) mu(y) v(y) dy`` on the grid nodes.

    Closed form (untruncated minimal Green function, tail beyond ``R`` by
    quadrature) for symmetric-compatible subcritical specs; otherwise the
    time route column by column on the truncated grid.  ``finite`` is false
    when the tail integrand beyond ``R`` is not integrable.
    """
    x = grid.nodes
    mu_vals = _as_density(mu, x)
    if np.any(mu_vals < 0) or not np.any(mu_vals > 0):
        raise ValueError("mu must be nonnegative and not identically zero")
    if symmetric_compatible(spec):
        sc = scale_integrals(spec, grid)
        if not sc.critical:
            return _potential_closed_form(spec, grid, mu, mu_vals, sc)
    return _potential_via_time(spec, grid, mu_vals, dt, T_max)


def _potential_closed_form(spec, grid, mu, mu_vals, sc: ScaleIntegrals):
    x = grid.nodes
    lower, upper = sc.factors()
    if callable(mu):
        left, right = _potential_cells(spec, grid, mu, sc)
        with np.errstate(invalid="ignore", over="ignore"):
            vals = upper * left + lower * right
        if not np.isfinite(upper[0]):
            vals[0] = lower[0] * right[0]
    else:
        vals = _potential_nodes(spec, grid, mu_vals, lower, upper)
    vals = np.where(np.isfinite(vals), vals, np.nan)

    tail_val, finite, exponent = _potential_tail(spec, mu, sc, x[-1])
    if spec.entire_line:
        tail_left, finite_left, _ = _potential_tail(spec, mu, sc, x[0], direction=-1.0)
        finite = finite and finite_left
        vals = vals + upper * tail_left
    vals = vals + lower * tail_val
    finite = bool(finite and np.all(np.abs(vals[np.isfinite(vals)]) < OVERFLOW_GUARD))
    meta = {"tail_exponent": exponent, "tail": tail_val}
    return GreenPotential(grid, mu_vals, vals, finite, "closed_form", meta)


def _potential_cells(spec, grid, mu, sc: ScaleIntegrals, order=8):
    """Cumulative ``int lower f`` from the left and ``int upper f`` to the right.

    ``f = mu v / rho``; each cell is integrated by Gauss-Legendre with the
    scale integrals evaluated at the quadrature points, so the result is
    smooth up to the pole (where ``upper`` may be singular but integrable).
    """
    x = grid.nodes
    gx, gw = roots_legendre(order)
    lo, hi = x[:-1, None], x[1:, None]
    half = (hi - lo) / 2
    pts = (lo + hi) / 2 + half * gx[None, :]
    logf = _log_integrand(spec)
    # int_p^{hi} and int_{lo}^p of 1/(a v) for every quadrature point
    to_hi = np.empty_like(pts)
    from_lo = np.empty_like(pts)
    for k in range(order):
        p = pts[:, k:k + 1]
        sub_hi = (p + hi) / 2 + (hi - p) / 2 * gx[None, :]
        sub_lo = (lo + p) / 2 + (p - lo) / 2 * gx[None, :]
        with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
            to_hi[:, k] = ((hi - p)[:, 0] / 2) * (np.exp(logf(sub_hi)) @ gw)
            from_lo[:, k] = ((p - lo)[:, 0] / 2) * (np.exp(logf(sub_lo)) @ gw)
    s_plus = sc.s_plus[1:, None] + to_hi
    s_minus = sc.s_minus[:-1, None] + from_lo
    low_p, up_p = sc.factors(s_plus, s_minus)
    with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
        f = (_as_density(mu, pts) * np.exp(spec.coeffs.log_v(pts))
             / np.asarray(spec.rho(pts), dtype=float))
        cell_low = half[:, 0] * ((low_p * f) @ gw)
        cell_up = half[:, 0] * ((up_p * f) @ gw)
    cell_low = np.nan_to_num(cell_low, nan=0.0, posinf=np.inf)
    cell_up = np.nan_to_num(cell_up, nan=0.0, posinf=np.inf)
    left = np.concatenate([[0.0], np.cumsum(cell_low)])
    right = np.concatenate([np.cumsum(cell_up[::-1])[::-1], [0.0]])
    return left, right


def _potential_nodes(spec, grid, mu_vals, lower, upper):
    """Node-weight version of the potential for sampled densities."""
    logw = assemble_weights(spec, grid)
    rho = np.asarray(spec.rho(grid.nodes), dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        f = mu_vals * np.exp(logw) / rho
    f = np.where(f > 0, f, 0.0)
    with np.errstate(invalid="ignore"):
        lf = np.where(f > 0, lower * f, 0.0)
        uf = np.where(f > 0, upper * f, 0.0)
    if not np.isfinite(upper[0]):
        uf[0] = 0.0
    # node i itself belongs to both sums with half weight each
    left = np.cumsum(lf) - 0.5 * lf
    right = np.cumsum(uf[::-1])[::-1] - 0.5 * uf
    with np.errstate(invalid="ignore"):
        vals = upper * left + lower * right
        if not np.isfinite(upper[0]):
            vals[0] = lower[0] * np.sum(uf)
    return vals


def assemble_weights(spec, grid):
    from .discretize import cell_log_weights
    return cell_log_weights(spec, grid)


def _potential_tail(spec, mu, sc, start, direction=1.0):
    """``int_R^inf upper(y) mu(y) v(y) / rho(y) dy`` with a convergence check."""
    c = spec.coeffs
    logf = _log_integrand(spec)
    ys = start + direction * (np.logspace(0, 5, 801) - 1.0) * max(1.0, abs(start))
    # far-side scale factor for y beyond the grid
    seg = _cell_integrals(logf, ys if direction > 0 else ys[::-1])
    if direction > 0:
        if sc.plus_finite:
            s_far = sc.s_plus[-1] - np.concatenate([[0.0], np.cumsum(seg)])
        else:
            s_far = np.ones_like(ys)
    else:
        if sc.minus_finite:
            s_far = sc.s_minus[0] - np.concatenate([[0.0], np.cumsum(seg[::-1])])
            if sc.plus_finite:
                s_far = s_far / (sc.s_plus[0] + sc.s_minus[0])
        else:
            s_far = np.ones_like(ys)
    s_far = np.maximum(s_far, 0.0)
    mu_far = _as_density(mu, ys)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        logint = (np.log(s_far) + np.log(mu_far) + c.log_v(ys)
                  - np.log(np.asarray(spec.rho(ys), dtype=float)))
    # log-log slope of the integrand over the last decade
    far = slice(-161, None)
    good = np.isfinite(logint[far])
    if good.sum() < 3 or np.all(logint[far][good] < -700):
        exponent = -np.inf
        finite = True
    else:
        exponent = float(np.polyfit(np.log(np.abs(ys[far][good])), logint[far][good], 1)[0])
        finite = exponent < -1 - EPS_CRIT
    if not finite:
        return np.inf, False, exponent
    with np.errstate(over="ignore", under="ignore"):
        integrand = np.exp(logint)
    integrand = np.where(np.isfinite(integrand), integrand, 0.0)
    val = float(abs(integrate.trapezoid(integrand, ys)))
    if np.isfinite(exponent):
        # power-law remainder beyond the last sample
        val += float(integrand[-1] * abs(ys[-1]) / (-exponent - 1))
    return val, True, exponent


def _potential_via_time(spec, grid, mu_vals, dt, T_max):
    op = assemble(spec, grid)
    w = np.exp(op.log_w)
    vals = np.zeros(grid.n + 1)
    for j in op.active:
        if mu_vals[j] == 0 or (op.boundary["left"] == "reflecting" and j == op.active[0]):
            continue
        col = green_via_time(spec, grid, int(j), T_max, dt, op=op)
        vals += col.values * mu_vals[j] * w[j]
    finite = bool(np.all(np.isfinite(vals)) and np.all(vals < OVERFLOW_GUARD))
    return GreenPotential(grid, mu_vals, vals, finite, "time_integrated", {})


def comparability(gmu: GreenPotential, g: GreenTable, epsilon: float, cutoff=0.9):
    """Bounds ``c_low <= G_mu(x) / G(x, o) <= c_high`` away from ``o``."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if gmu.grid != g.grid:
        raise ValueError("potential and Green table live on different grids")
    x = g.grid.nodes
    keep = (np.abs(x - g.y) > epsilon) & (np.abs(x) <= cutoff * g.grid.R)
    gv = g.values[keep]
    if np.any(gv <= 0):
        raise ZeroDivisionError("Green function vanishes at a probe node")
    ratio = gmu.values[keep] / gv
    return {"c_low": float(np.min(ratio)), "c_high": float(np.max(ratio))}


# ---------------------------------------------------------------------------
# L1-Liouville

def green_mass(op: DiscreteOperator, y_index: int) -> float:
    """``sum_x G(x, y) v(x) h`` computed without forming ``v``.

    With ``G(., y) = A^{-1} e_y / w_y`` this equals ``(W^{-1} A^{-T} W 1)_y``.
    """
    adj = op.weighted_adjoint()
    q = solve_tridiagonal(adj, np.ones(adj.size))
    pos = int(np.searchsorted(op.active, y_index))
    return float(q[pos])


def classify_growth(schedule, I):
    """Verdict from ``I(R)`` sampled along an exhaustion schedule.

    The last relative increment decides: above 5% means ``I`` keeps growing
    (L1-Liouville), below 0.5% means it has saturated (not L1-Liouville).
    In between, with three or more radii, the ratio of successive increments
    resolves the case: geometric decay (ratio <= 0.75) with a small
    extrapolated remainder means convergence, non-decaying increments
    (ratio >= 0.95) mean divergence.
    """
    schedule = [float(R) for R in schedule]
    I = np.asarray(I, dtype=float)
    record = {"R": schedule, "I": I.tolist()}
    if len(I) < 2:
        record.update(rel_increment=None, slope=None)
        return "inconclusive", record
    inc = np.diff(I)
    rel = float(inc[-1] / I[-1])
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = float(np.log(I[-1] / I[-2]) / np.log(schedule[-1] / schedule[-2]))
    record.update(rel_increment=rel, slope=slope)
    if rel > GROW_L1:
        return "L1-Liouville", record
    if rel < SATURATE_L1:
        return "not L1-Liouville", record
    if len(inc) >= 2 and inc[-2] > 0:
        ratio = float(inc[-1] / inc[-2])
        record["increment_ratio"] = ratio
        if ratio <= 0.75:
            remainder = inc[-1] * ratio / (1 - ratio)
            record["extrapolated_remainder"] = float(remainder / I[-1])
            if remainder / I[-1] < GROW_L1:
                return "not L1-Liouville", record
        elif ratio >= 0.95:
            return "L1-Liouville", record
    return "inconclusive", record


def l1_liouville_verdict(spec: OperatorSpec, y: float, schedule, h: float):
    """Classify integrability of ``G(., y)`` from its growth under exhaustion.

    ``I(R) = sum_x G_R(x, y) v(x) h`` on each truncation; see
    :func:`classify_growth` for the decision rule.
    """
    schedule = [float(R) for R in schedule]
    base = make_grid(spec, schedule[0], h)
    I = []
    for g in exhaust(base, schedule):
        op = assemble(spec, g)
        I.append(green_mass(op, g.index_of(y)))
    return classify_growth(schedule, I)
