"""Multipliers that force stochastic incompleteness, and their certificates.

Two recipes produce a positive ``rho`` such that ``rho P`` is stochastically
incomplete while keeping the L1-Liouville verdict of ``P``:

* ``rho_from_measure``: ``rho = 1/mu`` for a density ``mu`` whose Green
  potential ``G_mu`` is finite.  Then ``u = -G_mu`` is negative, bounded,
  tends to 0 at infinity and satisfies ``(-rho P) u = 1``.
* ``rho_from_hardy``: with ``W = P(sqrt G_phi)/sqrt G_phi`` the optimal Hardy
  weight of a compactly supported ``phi``, ``rho = (W sqrt G_phi)^{-1}``
  outside the support, blended to a constant inside.

The remaining functions certify the result independently: the Omori-Yau
scan, the bounded solution ``w = 1 - lam int e^{-lam t} m dt`` of
``(P + lam) w = 0`` and the critical weight ``W_mu = mu / G_mu``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .discretize import Grid1D, assemble, make_grid
from .errors import CriticalSpecError, HypothesisFailed, InfinitePotential, StageError
from .green import (
    GreenPotential,
    comparability,
    green_closed_form,
    green_direct,
    green_potential,
    solve_tridiagonal,
)
from .model import OperatorSpec, rescale, symmetric_compatible
from .semigroup import Stepper

DECAY_GATE = 0.05
CERT_MARGIN = 0.01
CERT_TOL = 5e-3
G_FLOOR = 1e-12


def mu_power(s: float) -> Callable:
    """The density ``(1 + r^2)^{-s}``."""
    return lambda r, s=float(s): (1.0 + np.asarray(r, dtype=float) ** 2) ** (-s)


MU_SET = {s: mu_power(s) for s in (1.5, 2.0, 3.0)}


@dataclass
class RhoRecipe:
    kind: str
    rho: Callable
    nodes: np.ndarray
    samples: np.ndarray
    provenance: dict = field(default_factory=dict)


@dataclass
class HardyWeight:
    grid: Grid1D
    W: np.ndarray
    W_ff: np.ndarray
    gphi: np.ndarray
    support_cutoff: float
    residual: np.ndarray
    spec: OperatorSpec = field(repr=False)

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes


@dataclass
class WitnessFunction:
    grid: Grid1D
    u: np.ndarray
    sup_value: float
    residual: np.ndarray  # (-P_rho) u on the active nodes, nan elsewhere


# ---------------------------------------------------------------------------
# decay gate

def _green_column(spec, grid, o_index):
    if symmetric_compatible(spec):
        return green_closed_form(spec, o_index, grid)
    return green_direct(spec, grid, o_index)


def decay_gate(spec: OperatorSpec, o: float = 1.0, R: float = 40.0, h: float = 0.02) -> dict:
    """Finite-radius proxy for ``G(x, o) -> 0`` at infinity.

    Passes when ``G(0.9 R, o) < 5% G(o, o)`` at ``R`` and at ``2R`` and the
    ratio does not grow under the doubling.  A critical spec has no Green
    function and fails.
    """
    ratios = []
    for radius in (R, 2 * R):
        grid = make_grid(spec, radius, h)
        io = grid.index_of(o)
        try:
            g = _green_column(spec, grid, io).values
        except CriticalSpecError:
            return {"passed": False, "reason": "critical: no minimal Green function",
                    "ratios": []}
        ratios.append(float(g[grid.index_of(0.9 * radius)] / g[io]))
    passed = all(q < DECAY_GATE for q in ratios) and ratios[1] <= ratios[0] * (1 + 1e-9)
    reason = "" if passed else "Green function does not decay at the truncation"
    return {"passed": passed, "reason": reason, "ratios": ratios}


# ---------------------------------------------------------------------------
# inverse-measure recipe

def rho_from_measure(spec: OperatorSpec, mu: Callable, grid: Grid1D | None = None,
                     o: float = 1.0, epsilon: float = 0.5) -> RhoRecipe:
    """``rho = 1/mu`` after checking the potential and the decay hypotheses.

    Raises
    ------
    InfinitePotential
        ``G_mu`` diverges.
    HypothesisFailed
        ``G(., o)`` does not decay at the truncation (gate ``"decay"``).
    """
    grid = grid or make_grid(spec, 40.0, 0.02)
    gate = decay_gate(spec, o, grid.R, grid.h)
    if not gate["passed"]:
        raise HypothesisFailed(f"decay gate failed: {gate['reason']}", gate="decay")
    gmu = green_potential(spec, grid, mu)
    if not gmu.finite:
        raise InfinitePotential("the Green potential of mu diverges")
    g = _green_column(spec, grid, grid.index_of(o))
    consts = comparability(gmu, g, epsilon)
    if not (0 < consts["c_low"] <= consts["c_high"] < np.inf):
        raise HypothesisFailed("G_mu is not comparable to G away from o", gate="comparability")

    def rho(r, mu=mu):
        return 1.0 / np.asarray(mu(np.asarray(r, dtype=float)), dtype=float)

    x = grid.nodes
    prov = {"mu": mu, "potential": gmu, "comparability": consts, "decay_gate": gate,
            "o": o, "epsilon": epsilon}
    return RhoRecipe("inverse_measure", rho, x, rho(x), prov)


def witness(spec: OperatorSpec, recipe: RhoRecipe, grid: Grid1D | None = None,
            epsilon: float | None = None) -> WitnessFunction:
    """``u = -G_mu`` (or ``-sqrt G_phi``) and its residual ``(-P_rho) u``.

    For both recipes the residual is identically 1 in the continuum (outside
    the support of ``phi`` for the Hardy route).
    """
    if recipe.kind == "inverse_measure":
        gmu: GreenPotential = recipe.provenance["potential"]
        grid = grid or gmu.grid
        if grid != gmu.grid:
            gmu = green_potential(spec, grid, recipe.provenance["mu"])
        u = -gmu.values
        o = recipe.provenance["o"]
        epsilon = recipe.provenance["epsilon"] if epsilon is None else epsilon
    elif recipe.kind == "hardy_route":
        hw: HardyWeight = recipe.provenance["hardy"]
        grid = grid or hw.grid
        u = -np.sqrt(hw.gphi)
        o = grid.r_min
        epsilon = recipe.provenance["K_edge"] if epsilon is None else epsilon
    else:
        raise ValueError(f"unknown recipe kind {recipe.kind!r}")
    op = assemble(rescale(spec, recipe.rho, nodes=grid.nodes[1:]), grid)
    residual = np.full(grid.n + 1, np.nan)
    residual[op.active] = -op.apply(u)
    far = np.abs(grid.nodes - o) > epsilon
    return WitnessFunction(grid, u, float(np.max(u[far])), residual)


def omori_yau_scan(spec: OperatorSpec, u, n_levels: int, grid: Grid1D) -> list[dict]:
    """Minima of ``(-P) u`` over ``{u > sup u - 1/n}`` for ``n = 1..n_levels``.

    ``sup u`` is taken over the grid nodes.  The scan stops at the first
    level whose set contains no active node.
    """
    u = np.asarray(u, dtype=float)
    op = assemble(spec, grid)
    minus_pu = -op.apply(u)
    ua = u[op.active]
    top = float(np.max(u))
    out = []
    for n in range(1, n_levels + 1):
        level = 1.0 / n
        inside = np.flatnonzero(ua > top - level)
        if inside.size == 0:
            out.append({"level": level, "node": None, "value": None, "empty": True})
            break
        k = inside[np.argmin(minus_pu[inside])]
        out.append({"level": level, "node": float(grid.nodes[op.active[k]]),
                    "value": float(minus_pu[k]), "empty": False})
    return out


def omori_yau_flag(records: list[dict], margin: float = 0.1) -> bool:
    """Incompleteness flag: every nonempty level keeps ``(-P)u >= margin``."""
    vals = [r["value"] for r in records if not r["empty"]]
    return bool(vals) and min(vals) >= margin


# ---------------------------------------------------------------------------
# bounded eigenfunction certificate

@dataclass
class EigenCertificate:
    grid: Grid1D
    w: np.ndarray
    verdict: str
    window: tuple
    meta: dict = field(default_factory=dict)


def bounded_eigen_certificate(spec: OperatorSpec, lam: float = 1.0,
                              grid: Grid1D | None = None, dt: float = 1e-3,
                              window=(1.0, 5.0), rtol: float = 1e-2) -> EigenCertificate:
    """``w = 1 - lam * int_0^inf e^{-lam t} m(., t) dt`` and its verdict.

    The time integral runs until ``e^{-lam T} < 1e-10`` and is cross-checked
    against the resolvent ``(lam + A)^{-1} 1``; a mismatch above ``rtol``
    (sup-relative on the window) is a quadrature failure.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    grid = grid or make_grid(spec, 40.0, 0.02)
    op = assemble(spec, grid)
    T = np.log(1e10) / lam
    n_steps = int(np.ceil(T / dt))
    stepper = Stepper(op, dt)
    m = np.ones(op.size)
    acc = np.zeros(op.size)
    # step n carries int_{(n-1)dt}^{n dt} e^{-lam t} dt, so the weights sum to 1/lam
    decay = np.exp(-lam * dt)
    weight = -np.expm1(-lam * dt) / lam
    for _ in range(n_steps):
        m = stepper.step(m)
        acc += weight * m
        weight *= decay
    v = op.to_full(acc)

    shifted = type(op)(op.grid, op.active, op.sub, op.diag + lam, op.sup, op.scheme,
                       op.upwind_mask, op.boundary, op.log_w, op.label)
    v_res = op.to_full(solve_tridiagonal(shifted, np.ones(op.size)))
    win = grid.window(*window)
    mismatch = float(np.max(np.abs(v[win] - v_res[win])) / np.max(np.abs(v_res[win])))
    if mismatch > rtol:
        raise StageError("certificate", f"Laplace quadrature off the resolvent by {mismatch:.3g}")
    w = 1.0 - lam * v
    w[op.active] = np.clip(w[op.active], 0.0, 1.0)
    if np.min(w[win]) >= CERT_MARGIN:
        verdict = "incomplete-certified"
    elif np.max(w[win]) <= CERT_TOL:
        verdict = "no certificate"
    else:
        verdict = "inconclusive"
    meta = {"lambda": lam, "T": n_steps * dt, "resolvent_mismatch": mismatch,
            "w_min": float(np.min(w[win])), "w_max": float(np.max(w[win]))}
    return EigenCertificate(grid, w, verdict, tuple(window), meta)


# ---------------------------------------------------------------------------
# Hardy route

def bump(K: float) -> Callable:
    """Smooth density supported on ``[0, K)``."""
    def phi(r):
        r = np.asarray(r, dtype=float)
        s = np.clip(np.abs(r) / K, 0.0, 1.0)
        out = np.zeros_like(s)
        inside = s < 1
        out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
        return out
    return phi


def _log_derivatives(logg, h, reflecting):
    """Centred first and second differences of ``log G`` (nan at the ends)."""
    d1 = np.full_like(logg, np.nan)
    d2 = np.full_like(logg, np.nan)
    d1[1:-1] = (logg[2:] - logg[:-2]) / (2 * h)
    d2[1:-1] = (logg[2:] - 2 * logg[1:-1] + logg[:-2]) / h**2
    if reflecting:
        d1[0] = 0.0
        d2[0] = 2 * (logg[1] - logg[0]) / h**2
    return d1, d2


def hardy_weight(spec: OperatorSpec, phi: Callable, grid: Grid1D, K_edge: float) -> HardyWeight:
    """Optimal Hardy weight ``W = P(sqrt G_phi) / sqrt G_phi`` and its far-field form.

    ``W`` is evaluated from centred differences of ``log G_phi``; ``W_ff =
    rho a (log G_phi)'^2 / 4`` is reported beyond ``K_edge``.  ``residual``
    is ``P sqrt(G_phi) - W sqrt(G_phi)`` with ``P`` the assembled stencil.
    Nodes where ``G_phi < 1e-12`` are excluded (nan).
    """
    x = grid.nodes
    if np.any(np.asarray(phi(x[x > K_edge]), dtype=float) != 0):
        raise ValueError("phi must vanish beyond K_edge")
    gp = green_potential(spec, grid, phi)
    if not gp.finite:
        raise InfinitePotential("the Green potential of phi diverges")
    G = gp.values
    if np.any(G[np.isfinite(G)] <= 0):
        raise StageError("hardy", "G_phi is not positive")
    with np.errstate(divide="ignore", invalid="ignore"):
        logg = np.log(G)
    op = assemble(spec, grid)
    reflecting = op.boundary["left"] == "reflecting"
    d1, d2 = _log_derivatives(logg, grid.h, reflecting)
    c = spec.coeffs
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.asarray(c.a(x), dtype=float)
        b = np.asarray(c.b(x), dtype=float)
        rho = np.asarray(spec.rho(x), dtype=float)
        W = rho * (-a * (d2 / 2 + d1**2 / 4) + b * d1 / 2)
    if reflecting:
        pole = op.boundary["pole_factor"]
        W[0] = -rho[0] * a[0] * (1 + pole) * d2[0] / 2
    W_ff = np.where(x > K_edge, rho * a * d1**2 / 4, np.nan)
    bad = ~(G >= G_FLOOR)
    W[bad] = np.nan
    W_ff[bad] = np.nan

    sq = np.sqrt(np.where(np.isfinite(G), G, np.nan))
    residual = np.full(grid.n + 1, np.nan)
    residual[op.active] = op.apply(sq) - W[op.active] * sq[op.active]
    return HardyWeight(grid, W, W_ff, G, float(K_edge), residual, spec)


def _power_extrapolation(x, y, lo_frac=0.5):
    """PCHIP in log-log with power-law continuation on both sides."""
    lx, ly = np.log(x), np.log(y)
    interp = PchipInterpolator(lx, ly, extrapolate=False)
    far = lx >= lx[0] + lo_frac * (lx[-1] - lx[0])
    p_right = float(np.polyfit(lx[far], ly[far], 1)[0])

    def f(r):
        r = np.asarray(r, dtype=float)
        lr = np.log(np.maximum(r, x[0]))
        out = interp(np.clip(lr, lx[0], lx[-1]))
        beyond = lr > lx[-1]
        out = np.where(beyond, ly[-1] + p_right * (lr - lx[-1]), out)
        return np.exp(out)
    return f, p_right


def rho_from_hardy(hw: HardyWeight, K_edge: float | None = None, fit_cut: float = 0.9) -> RhoRecipe:
    """``rho = (W sqrt G_phi)^{-1}`` beyond ``K_edge`` with a C1 blend inside.

    Inside, ``rho`` is the quadratic ``c0 + s (r - K + L)^2 / (2L)`` on
    ``[K - L, K]`` (value and slope matched at ``K``, zero slope at
    ``K - L``) and the constant ``c0 > 0`` below.  Beyond the sampled range
    the logarithm of ``rho`` is continued linearly in ``log r``.

    Raises
    ------
    HypothesisFailed
        ``W <= 0`` at some node beyond ``K_edge`` (gate ``"W>0"``).
    """
    K = hw.support_cutoff if K_edge is None else float(K_edge)
    x = hw.nodes
    keep = (x >= K) & (x <= fit_cut * hw.grid.R) & np.isfinite(hw.W)
    W = hw.W[keep]
    if W.size < 10:
        raise HypothesisFailed("too few nodes beyond the support", gate="W>0")
    if np.any(W <= 0):
        bad = float(x[keep][np.argmin(W)])
        raise HypothesisFailed(f"W is not positive beyond K (first failure near r={bad:g})",
                               gate="W>0")
    xs = x[keep]
    samples = 1.0 / (W * np.sqrt(hw.gphi[keep]))
    outer, power = _power_extrapolation(xs, samples)
    rho_K = float(samples[0])
    slope = float((np.log(samples[1]) - np.log(samples[0])) / (xs[1] - xs[0]) * rho_K)
    span = K - hw.grid.r_min
    L = span if slope <= 0 else min(span, rho_K / slope)
    L = max(L, 1e-12)
    c0 = rho_K - slope * L / 2
    K0 = float(xs[0])

    def rho(r):
        r = np.asarray(r, dtype=float)
        inner = np.where(r <= K0 - L, c0, c0 + slope * (r - K0 + L) ** 2 / (2 * L))
        return np.where(r >= K0, outer(r), inner)

    prov = {"hardy": hw, "K_edge": K, "blend": {"c0": c0, "L": L, "slope": slope,
                                                "rho_K": rho_K},
            "far_exponent": power}
    return RhoRecipe("hardy_route", rho, x, rho(x), prov)


def critical_hardy_from_measure(spec: OperatorSpec, mu: Callable, grid: Grid1D) -> dict:
    """``W_mu = mu / G_mu`` with ground state ``G_mu`` and residual ``(P - W_mu) G_mu``."""
    gmu = green_potential(spec, grid, mu)
    if not gmu.finite:
        raise InfinitePotential("the Green potential of mu diverges")
    mu_vals = gmu.mu
    W_mu = mu_vals / gmu.values
    op = assemble(spec, grid)
    residual = np.full(grid.n + 1, np.nan)
    residual[op.active] = op.apply(gmu.values) - W_mu[op.active] * gmu.values[op.active]
    return {"W_mu": W_mu, "ground_state": gmu.values, "residual": residual, "grid": grid}
