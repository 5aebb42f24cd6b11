"""Skew products ``P = P1 (x) I + I (x) P2`` of two one-dimensional operators.

The heat kernel of the product factorizes, ``k = k1 k2``, so masses and
Green integrals follow from the factors.  ``coarse_validation`` checks the
factorization against an independent 2-D implicit-Euler evolution on the
tensor grid.  ``theorem54_table`` transfers component verdicts to the
product and cites the rule used for each.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .diagnostics import DiagnosticsReport
from .discretize import assemble, exhaust, make_grid
from .green import classify_growth
from .model import OperatorSpec
from .semigroup import KernelSlice, MassCurve, Stepper, delta, kernel_slice, mass_curve

UNDETERMINED = "undetermined"

RULES = {
    "subcritical-factor": "a subcritical factor makes the product subcritical",
    "not-L1-factor": "a factor that is not L1-Liouville, the other symmetric: product not L1-Liouville",
    "L1-factor": ("an L1-Liouville factor, the other symmetric and stochastically complete: "
                  "product L1-Liouville"),
    "complete-factors": ("both factors complete: product complete; "
                         "L1-Liouville as well when both are symmetric"),
    "incomplete-factor": "an incomplete factor makes the product incomplete",
    "critical-factor": ("a critical factor, the other symmetric and stochastically complete: "
                        "product L1-Liouville"),
}


class ContradictoryVerdicts(ValueError):
    """Two transfer rules disagree: an upstream verdict is numerically wrong."""


def _times_index(times, t):
    j = int(np.argmin(np.abs(np.asarray(times) - t)))
    if not np.isclose(times[j], t, rtol=1e-9, atol=1e-12):
        raise ValueError(f"time {t} missing from a factor")
    return j


def product_kernel(s1: KernelSlice, s2: KernelSlice, t: float) -> np.ndarray:
    """``k1(x1, y1, t) k2(x2, y2, t)`` on the tensor grid, shape ``(n1+1, n2+1)``."""
    k1 = s1.values[:, _times_index(s1.times, t)]
    k2 = s2.values[:, _times_index(s2.times, t)]
    return np.outer(k1, k2)


@dataclass
class ProductMass:
    grids: tuple
    times: np.ndarray
    values: np.ndarray  # shape (n1+1, n2+1, n_times)

    def at(self, t) -> np.ndarray:
        return self.values[:, :, _times_index(self.times, t)]


def product_mass(m1: MassCurve, m2: MassCurve) -> ProductMass:
    if len(m1.times) != len(m2.times) or not np.allclose(m1.times, m2.times):
        raise ValueError("mass curves must share their time levels")
    vals = m1.values[:, None, :] * m2.values[None, :, :]
    return ProductMass((m1.grid, m2.grid), np.array(m1.times), vals)


def product_subcriticality(d1: DiagnosticsReport, d2: DiagnosticsReport) -> dict:
    v = (d1.criticality["verdict"], d2.criticality["verdict"])
    if "subcritical" in v:
        return {"verdict": "subcritical", "rule": "subcritical-factor"}
    return {"verdict": UNDETERMINED, "rule": None}


@dataclass
class ProductDiagnostics:
    first: DiagnosticsReport
    second: DiagnosticsReport
    product_verdicts: dict
    symmetric: tuple = (False, False)

    def rows(self) -> list[dict]:
        out = []
        for key in ("subcritical", "complete", "l1_liouville"):
            item = self.product_verdicts[key]
            out.append({"first": self.first.label, "second": self.second.label,
                        "property": key, "verdict": item["verdict"],
                        "rule": item["rule"] or "none"})
        return out


def _merge(candidates, what):
    verdicts = {v for v, _ in candidates}
    if len(verdicts) > 1:
        raise ContradictoryVerdicts(f"{what}: rules disagree {candidates}")
    if not candidates:
        return {"verdict": UNDETERMINED, "rule": None}
    return {"verdict": candidates[0][0], "rule": "+".join(sorted({r for _, r in candidates}))}


def theorem54_table(d1: DiagnosticsReport, d2: DiagnosticsReport, sym1: bool | None = None,
                    sym2: bool | None = None) -> ProductDiagnostics:
    """Product verdicts derived from the factors' verdicts, each with its rule.

    The L1-Liouville transfer from an L1-Liouville factor needs the other
    factor to be symmetric *and* stochastically complete; see ``RULES``.
    No verdict is emitted without a matching rule.

    Raises
    ------
    ContradictoryVerdicts
        Two applicable rules give opposite verdicts.
    """
    sym = (d1.symmetric if sym1 is None else bool(sym1),
           d2.symmetric if sym2 is None else bool(sym2))
    d = (d1, d2)
    comp = [x.completeness["verdict"] for x in d]
    l1 = [x.l1_liouville["verdict"] for x in d]
    crit = [x.criticality["verdict"] for x in d]

    if "incomplete" in comp:
        complete = {"verdict": "incomplete", "rule": "incomplete-factor"}
    elif comp == ["complete", "complete"]:
        complete = {"verdict": "complete", "rule": "complete-factors"}
    else:
        complete = {"verdict": UNDETERMINED, "rule": None}

    cands = []
    for i, j in ((0, 1), (1, 0)):
        if l1[i] == "not L1-Liouville" and sym[j]:
            cands.append(("not L1-Liouville", "not-L1-factor"))
        if l1[i] == "L1-Liouville" and sym[j] and comp[j] == "complete":
            cands.append(("L1-Liouville", "L1-factor"))
        if crit[i] == "critical" and sym[j] and comp[j] == "complete":
            cands.append(("L1-Liouville", "critical-factor"))
    if comp == ["complete", "complete"] and all(sym):
        cands.append(("L1-Liouville", "complete-factors"))
    verdicts = {
        "subcritical": product_subcriticality(d1, d2),
        "complete": complete,
        "l1_liouville": _merge(cands, "L1-Liouville"),
    }
    return ProductDiagnostics(d1, d2, verdicts, sym)


# ---------------------------------------------------------------------------
# product Green integral and 2-D validation

def _adjoint_mass_run(op, y_index, dt):
    adj = op.weighted_adjoint()
    pos = int(np.searchsorted(op.active, y_index))
    return Stepper(adj, dt), np.ones(adj.size), pos


def product_green_mass(spec1: OperatorSpec, spec2: OperatorSpec, y1: float, y2: float,
                       R: float, h: float, dt: float, T_max: float = 200.0,
                       rtol: float = 1e-10) -> float:
    """``int int G_P(x, y) v1 v2 dx = int_0^inf M1(t) M2(t) dt`` on one truncation.

    ``M_i(t) = int k_i(x, y_i, t) v_i(x) dx`` comes from the weighted adjoint
    evolution of the constant function.  The time sum stops when the
    integrand is below ``rtol`` times the accumulated value or at ``T_max``.
    """
    runs = []
    for spec, y in ((spec1, y1), (spec2, y2)):
        grid = make_grid(spec, R, h)
        runs.append(_adjoint_mass_run(assemble(spec, grid), grid.index_of(y), dt))
    (st1, u1, p1), (st2, u2, p2) = runs
    total = 0.0
    for _ in range(int(round(T_max / dt))):
        u1 = st1.step(u1)
        u2 = st2.step(u2)
        term = dt * u1[p1] * u2[p2]
        total += term
        if term <= rtol * total:
            break
    return float(total)


def product_l1_check(spec1, spec2, y1, y2, schedule, h=0.05, dt=2e-3, T_max=200.0):
    """Growth of the product Green integral along an exhaustion schedule."""
    I = [product_green_mass(spec1, spec2, y1, y2, R, h, dt, T_max) for R in schedule]
    return classify_growth(schedule, I)


def tensor_operator(op1, op2) -> sparse.csc_matrix:
    """``A1 (x) I + I (x) A2`` on active nodes, index ``i1 * n2 + i2``."""
    return sparse.kronsum(op2.matrix(), op1.matrix(), format="csc")


def _evolve_2d(op1, op2, u0, times, dt):
    n1, n2 = op1.size, op2.size
    lu = splu((sparse.identity(n1 * n2, format="csc") + dt * tensor_operator(op1, op2)).tocsc())
    u = u0.ravel().copy()
    out, now = [], 0.0
    for t in times:
        for _ in range(int(round((t - now) / dt))):
            u = lu.solve(u)
        now = t
        out.append(u.reshape(n1, n2).copy())
    return out


def coarse_validation(spec1: OperatorSpec, spec2: OperatorSpec, y=(1.0, 1.0),
                      times=(0.5, 1.0), h: float = 0.1, R: float = 10.0,
                      dt: float = 1e-3, probe_floor: float = 1e-3) -> dict:
    """Direct 2-D evolution against the product of 1-D results.

    Returns the sup-relative kernel defect over interior probes (where the
    product kernel exceeds ``probe_floor`` of its maximum, away from the
    outer 10% of each factor) and the sup-relative mass defect, per time.
    """
    grids = [make_grid(s, R, h) for s in (spec1, spec2)]
    ops = [assemble(s, g) for s, g in zip((spec1, spec2), grids)]
    idx = [g.index_of(v) for g, v in zip(grids, y)]
    d0 = np.outer(ops[0].to_active(delta(ops[0], idx[0])), ops[1].to_active(delta(ops[1], idx[1])))
    k2d = _evolve_2d(ops[0], ops[1], d0, times, dt)
    m2d = _evolve_2d(ops[0], ops[1], np.ones((ops[0].size, ops[1].size)), times, dt)
    slices = [kernel_slice(s, g, i, times, dt, op=o)
              for s, g, i, o in zip((spec1, spec2), grids, idx, ops)]
    masses = [mass_curve(s, g, times, dt, op=o) for s, g, o in zip((spec1, spec2), grids, ops)]
    inner = [np.abs(g.nodes[o.active]) <= 0.9 * R for g, o in zip(grids, ops)]
    out = {"kernel_defect": [], "mass_defect": []}
    for j, t in enumerate(times):
        prod = product_kernel(*slices, t)[np.ix_(ops[0].active, ops[1].active)]
        keep = np.outer(inner[0], inner[1]) & (prod > probe_floor * prod.max())
        out["kernel_defect"].append(float(np.max(np.abs(k2d[j] - prod)[keep]) / np.max(prod[keep])))
        pm = product_mass(*masses).at(t)[np.ix_(ops[0].active, ops[1].active)]
        mk = np.outer(inner[0], inner[1])
        out["mass_defect"].append(float(np.max(np.abs(m2d[j] - pm)[mk]) / np.max(pm[mk])))
    out.update(times=list(times), h=h, R=R, dt=dt)
    return out
