"""Implicit-Euler evolution of the heat semigroup ``exp(-tP)``.

Every step solves ``(I + dt A) u_{k+1} = u_k`` with the assembled M-matrix
``A``; the factorization is computed once per ``(operator, dt)`` pair.
Positivity and the sub-Markov bound ``e^{-tP} 1 <= 1`` are inherited from the
sign pattern of ``A``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack

from .discretize import DiscreteOperator, Grid1D, assemble
from .model import OperatorSpec


class Stepper:
    """Pre-factorized implicit-Euler step for one operator and step size."""

    def __init__(self, op: DiscreteOperator, dt: float):
        if not dt > 0:
            raise ValueError("dt must be positive")
        self.op = op
        self.dt = float(dt)
        dl = dt * op.sub[1:]
        d = 1.0 + dt * op.diag
        du = dt * op.sup[:-1]
        self._lu = lapack.dgttrf(dl, d, du)
        if self._lu[-1] != 0:
            raise AssertionError("singular implicit-Euler matrix")

    def step(self, u: np.ndarray, count: int = 1) -> np.ndarray:
        """Advance active-node data ``u`` (1-D or one column per RHS)."""
        dl, d, du, du2, ipiv, _ = self._lu
        for _ in range(count):
            u, info = lapack.dgttrs(dl, d, du, du2, ipiv, u)
            if info != 0:
                raise AssertionError("tridiagonal solve failed")
        return u


def _schedule(t, dt):
    """Whole steps of size ``dt`` and the final partial step (may be 0)."""
    count = int(np.floor(t / dt + 1e-9))
    rest = t - count * dt
    if rest < 1e-12 * max(1.0, t):
        rest = 0.0
    return count, rest


def evolve(op: DiscreteOperator, f, t: float, dt: float) -> np.ndarray:
    """Implicit-Euler approximation of ``e^{-tP} f`` on the full grid.

    Dirichlet nodes are returned as zero.  A final partial step of length
    ``t mod dt`` is taken when ``t`` is not a multiple of ``dt``.
    """
    if not t > 0 or not dt > 0:
        raise ValueError("t and dt must be positive")
    f = np.asarray(f, dtype=float)
    if not np.all(np.isfinite(f)):
        raise ValueError("initial data must be finite")
    u = op.to_active(f) if f.shape[0] == op.grid.n + 1 else np.array(f)
    count, rest = _schedule(t, dt)
    if count:
        u = Stepper(op, dt).step(u, count)
    if rest:
        u = Stepper(op, rest).step(u, 1)
    return op.to_full(u)


def _evolve_recording(op, u, times, dt, stepper=None):
    """Evolve active data and record it at each of ``times``."""
    stepper = stepper or Stepper(op, dt)
    out = []
    now = 0.0
    for t in times:
        count, rest = _schedule(t - now, dt)
        if count:
            u = stepper.step(u, count)
        if rest:
            u = Stepper(op, rest).step(u, 1)
        now = t
        out.append(np.array(u))
    return out


def _check_times(times):
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0 or np.any(times <= 0) or np.any(np.diff(times) <= 0):
        raise ValueError("times must be positive and strictly increasing")
    return times


@dataclass
class MassCurve:
    """``m(x_i, t_j) = (e^{-t_j P} 1)(x_i)`` on every grid node."""

    grid: Grid1D
    times: np.ndarray
    values: np.ndarray  # shape (n_nodes, n_times)
    label: str = ""
    meta: dict = field(default_factory=dict)

    def at(self, t) -> np.ndarray:
        j = int(np.argmin(np.abs(self.times - t)))
        if not np.isclose(self.times[j], t):
            raise ValueError(f"time {t} not recorded in this curve")
        return self.values[:, j]


def mass_curve(spec: OperatorSpec, grid: Grid1D, times, dt: float, op=None) -> MassCurve:
    times = _check_times(times)
    op = op or assemble(spec, grid)
    ones = np.ones(op.size)
    snaps = _evolve_recording(op, ones, times, dt)
    values = np.column_stack([op.to_full(s) for s in snaps])
    return MassCurve(grid, times, values, spec.label, {"dt": dt})


@dataclass
class KernelSlice:
    """``k(x_i, y, t_j)``: heat kernel against ``v dy`` from one source node."""

    grid: Grid1D
    y_index: int
    times: np.ndarray
    values: np.ndarray  # shape (n_nodes, n_times)
    op: DiscreteOperator = field(repr=False)
    dt: float = 0.0
    label: str = ""

    def at(self, t) -> np.ndarray:
        j = int(np.argmin(np.abs(self.times - t)))
        if not np.isclose(self.times[j], t, rtol=1e-9, atol=1e-12):
            raise ValueError(f"time {t} not recorded in this slice")
        return self.values[:, j]

    def clamped(self) -> np.ndarray:
        return np.maximum(self.values, 0.0)


def delta(op: DiscreteOperator, y_index: int) -> np.ndarray:
    """Discrete Dirac mass at node ``y_index`` against the weights ``v h``."""
    if y_index not in set(op.active.tolist()):
        raise ValueError(f"source node {y_index} is not an interior (active) node")
    if op.boundary["left"] == "reflecting" and y_index == op.active[0]:
        raise ValueError("source node lies on the reflecting boundary")
    f = np.zeros(op.grid.n + 1)
    f[y_index] = np.exp(-op.log_w[y_index])
    return f


def kernel_slice(spec: OperatorSpec, grid: Grid1D, y_index: int, times, dt: float,
                 op=None) -> KernelSlice:
    times = _check_times(times)
    op = op or assemble(spec, grid)
    u0 = op.to_active(delta(op, y_index))
    snaps = _evolve_recording(op, u0, times, dt)
    values = np.column_stack([op.to_full(s) for s in snaps])
    return KernelSlice(grid, y_index, times, values, op, dt, spec.label)


def chapman_kolmogorov_defect(slice_: KernelSlice, s: float, t: float, probes=None,
                              floor: float = 1e-8) -> float:
    """Relative defect of ``k(s+t) = int k(., z, s) k(z, y, t) v(z) dz``.

    The left factor ``k(x, ., s)`` is a row of the kernel: it is obtained from
    the adjoint evolution started at each probe node ``x``, with the same
    operator and step as the slice.  ``s = 0`` is the identity composition
    and returns 0.
    """
    if s == 0 or t == 0:
        return 0.0
    k_st = slice_.at(s + t)
    k_t = slice_.at(t)
    op = slice_.op
    w = np.exp(op.log_w)
    if probes is None:
        cand = op.active[1:-1]
        cand = cand[k_st[cand] > floor]
        probes = cand[:: max(1, len(cand) // 25)]
    probes = [int(p) for p in probes if k_st[p] > floor]
    if not probes:
        return 0.0
    adj = op.weighted_adjoint()
    # row x of the kernel at time s: k(x, z, s) = [B^n]_{xz} / w_z
    # and W^{-1} B^T W e_x / w_x gives [B^n]_{xz} / w_z for all z at once
    cols = np.zeros((op.size, len(probes)))
    pos = {int(n): k for k, n in enumerate(op.active)}
    for j, p in enumerate(probes):
        cols[pos[p], j] = 1.0 / w[p]
    rows = _evolve_recording(adj, cols, [s], slice_.dt)[0]
    kt_active = k_t[op.active]
    composed = (rows * (kt_active * w[op.active])[:, None]).sum(axis=0)
    target = k_st[probes]
    return float(np.max(np.abs(target - composed) / target))


def dichotomy_check(curve: MassCurve, t: float, tol: float, window=None) -> str:
    """Classify ``m(., t)`` as all_equal_one, all_below_one or violated.

    ``window`` restricts the probe nodes; nodes in the outer quarter of the
    truncation are always excluded, since the Dirichlet end drains them.
    """
    g = curve.grid
    m = curve.at(t)
    x = g.nodes
    keep = np.abs(x) <= 0.75 * g.R
    if window is not None:
        keep &= (x >= window[0]) & (x <= window[1])
    vals = m[keep]
    if np.all(vals >= 1 - tol):
        return "all_equal_one"
    if np.all(vals <= 1 - tol):
        return "all_below_one"
    return "violated"
