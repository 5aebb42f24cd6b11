"""Full verdict reports and the rescaling suite.

``diagnose`` runs, in order, the criticality stage (time-integrated Green
function), the completeness stage (mass curves under exhaustion, dichotomy,
Feller oracle) and the L1-Liouville stage (Green mass under exhaustion).
Every stage failure is re-raised as ``StageError`` carrying the stage name.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .constructions import (
    MU_SET,
    decay_gate,
    omori_yau_scan,
    rho_from_measure,
    witness,
)
from .discretize import assemble, exhaust, make_grid
from .errors import HypothesisFailed, InfinitePotential, StageError
from .feller import FellerReport, feller_test, oracle_agree
from .green import criticality_closed_form, green_via_time, l1_liouville_verdict
from .model import OperatorSpec, rescale, symmetric_compatible
from .semigroup import dichotomy_check, mass_curve

INCOMPLETE_FACTOR = 5.0


@dataclass(frozen=True)
class Budget:
    h: float = 0.02
    dt: float = 1e-3
    R_schedule: tuple = (10.0, 20.0, 40.0)
    T_max: float = 200.0
    probe: tuple = (1.0, 5.0)
    t_mass: float = 1.0
    mass_tol: float = 5e-3
    y: float = 1.0

    def __post_init__(self):
        if not (self.h > 0 and self.dt > 0 and self.T_max > 0 and self.t_mass > 0):
            raise ValueError("budget entries must be positive")
        R = list(self.R_schedule)
        if not R or any(b <= a for a, b in zip(R, R[1:])):
            raise ValueError("R schedule must be nonempty and strictly increasing")

    @property
    def R_max(self) -> float:
        return float(self.R_schedule[-1])


@dataclass
class DiagnosticsReport:
    label: str
    criticality: dict
    completeness: dict
    l1_liouville: dict
    symmetric: bool
    evidence: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    runtime_s: float = 0.0

    @property
    def verdicts(self) -> tuple:
        return (self.criticality["verdict"], self.completeness["verdict"],
                self.l1_liouville["verdict"])

    @property
    def inconclusive(self) -> bool:
        return "inconclusive" in self.verdicts or self.completeness.get("agree") is None

    def row(self) -> dict:
        """The fixed-schema CSV row (without the runtime column)."""
        agree = self.completeness.get("agree")
        return {
            "label": self.label,
            "criticality": self.criticality["verdict"],
            "completeness": self.completeness["verdict"],
            "mass_defect": f"{self.completeness['mass_defect']:.6g}",
            "feller_verdict": self.completeness["feller"].verdict,
            "agree": "na" if agree is None else str(bool(agree)).lower(),
            "l1_liouville": self.l1_liouville["verdict"],
            "l1_growth_slope": _fmt(self.l1_liouville["record"].get("slope")),
            "h": f"{self.evidence['h']:g}",
            "dt": f"{self.evidence['dt']:g}",
            "R_max": f"{self.evidence['R_schedule'][-1]:g}",
        }


def _fmt(x):
    return "nan" if x is None or not np.isfinite(x) else f"{x:.6g}"


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except Exception as exc:  # noqa: BLE001 - relabel with the stage name
        raise StageError(name, f"{type(exc).__name__}: {exc}") from exc


def _criticality(spec, budget):
    grid = make_grid(spec, budget.R_max, budget.h)
    table = green_via_time(spec, grid, grid.index_of(budget.y), budget.T_max, budget.dt)
    out = {"verdict": table.verdict, "tail_slope": table.tail_meta["tail_slope"],
           "tail_exponent": table.tail_meta["tail_exponent"], "T_max": budget.T_max}
    if symmetric_compatible(spec):
        out["closed_form"] = criticality_closed_form(spec, grid)
    return out


def _completeness(spec, budget):
    base = make_grid(spec, budget.R_schedule[0], budget.h)
    defects = []
    verdicts = []
    for grid in exhaust(base, budget.R_schedule):
        curve = mass_curve(spec, grid, [budget.t_mass], budget.dt)
        m = curve.at(budget.t_mass)[grid.window(*budget.probe)]
        defects.append(float(1.0 - np.max(m)))
        verdicts.append(dichotomy_check(curve, budget.t_mass, budget.mass_tol, budget.probe))
    dich = verdicts[-1]
    defect = defects[-1]
    resid = abs(defects[-1] - defects[-2]) if len(defects) > 1 else np.inf
    if dich == "all_below_one" and defect > INCOMPLETE_FACTOR * resid:
        verdict = "incomplete"
    elif dich == "violated":
        verdict = "inconclusive"
    else:
        verdict = "complete"
    report: FellerReport = feller_test(spec)
    agree = oracle_agree(report, dich)
    return {"verdict": verdict, "dichotomy": dich, "mass_defect": defect,
            "defects": defects, "R_residual": resid, "feller": report, "agree": agree}


def _check_invariants(rep: DiagnosticsReport) -> list:
    bad = []
    crit, comp, l1 = rep.verdicts
    if rep.symmetric and comp == "complete" and l1 == "not L1-Liouville":
        bad.append("symmetric and complete but not L1-Liouville")
    if crit == "critical" and comp == "incomplete":
        bad.append("critical but stochastically incomplete")
    if crit == "critical" and l1 == "not L1-Liouville":
        bad.append("critical but not L1-Liouville")
    closed = rep.criticality.get("closed_form")
    if closed is not None and crit != "inconclusive" and closed != crit:
        bad.append(f"time route says {crit}, scale integrals say {closed}")
    if rep.completeness["agree"] is False:
        bad.append("Feller oracle disagrees with the mass dichotomy")
    return bad


def diagnose(spec: OperatorSpec, budget: Budget | None = None) -> DiagnosticsReport:
    """Criticality, completeness and L1-Liouville verdicts with evidence.

    Report invariants (complete symmetric operators are L1-Liouville,
    critical operators are complete and L1-Liouville, the oracle agrees) are
    checked and any violation is listed in ``violations``.
    """
    budget = budget or Budget()
    start = time.perf_counter()
    crit = _stage("criticality", _criticality, spec, budget)
    comp = _stage("completeness", _completeness, spec, budget)
    verdict, record = _stage("l1_liouville", l1_liouville_verdict, spec, budget.y,
                             budget.R_schedule, budget.h)
    evidence = {"R_schedule": [float(R) for R in budget.R_schedule], "h": budget.h,
                "dt": budget.dt, "T_max": budget.T_max, "probe": budget.probe,
                "mass_defects": comp["defects"], "I_R": record["I"]}
    rep = DiagnosticsReport(spec.label, crit, comp, {"verdict": verdict, "record": record},
                            symmetric_compatible(spec), evidence)
    rep.violations = _check_invariants(rep)
    rep.runtime_s = time.perf_counter() - start
    return rep


# ---------------------------------------------------------------------------
# rescaling suite

def _key(s) -> str:
    return f"{s:g}" if isinstance(s, (int, float)) else str(s)


@dataclass
class SuiteCase:
    s: float | str
    admissible: bool
    reason: str = ""
    report: DiagnosticsReport | None = None
    claim_incomplete: bool | None = None
    claim_l1_preserved: bool | None = None
    witness_residual: float | None = None
    omori_yau_min: float | None = None
    omori_yau: list = field(default_factory=list)
    witness: object = None


@dataclass
class SuiteSummary:
    label: str
    skipped: bool
    reason: str
    base: DiagnosticsReport | None
    cases: list

    @property
    def passed(self) -> bool:
        if self.skipped:
            return False
        done = [c for c in self.cases if c.admissible]
        return bool(done) and all(c.claim_incomplete and c.claim_l1_preserved for c in done)


def theorem24_suite(spec: OperatorSpec, mu_set: dict | None = None,
                    budget: Budget | None = None, window=(0.5, 20.0),
                    n_levels: int = 20) -> SuiteSummary:
    """Run the inverse-measure recipe for every density in ``mu_set``.

    ``mu_set`` maps a key (the exponent ``s`` of ``(1+r^2)^{-s}`` or any
    label) to a density callable.

    For each admissible ``mu`` the rescaled operator must be stochastically
    incomplete (claim 1) and keep the base L1-Liouville verdict (claim 2).
    The witness residual on ``window`` and the Omori-Yau minima are recorded.
    A spec failing the decay gate is skipped with reason ``"decay gate"``.
    """
    budget = budget or Budget()
    mu_set = MU_SET if mu_set is None else mu_set
    gate = decay_gate(spec, budget.y, budget.R_max, budget.h)
    if not gate["passed"]:
        return SuiteSummary(spec.label, True, "decay gate", None, [])
    base = diagnose(spec, budget)
    grid = make_grid(spec, budget.R_max, budget.h)
    cases = []
    for s, mu in mu_set.items():
        try:
            recipe = rho_from_measure(spec, mu, grid, o=budget.y)
        except (InfinitePotential, HypothesisFailed) as exc:
            cases.append(SuiteCase(s, False, str(exc)))
            continue
        scaled = rescale(spec, recipe.rho, nodes=grid.nodes[1:],
                         label=f"{spec.label}*rho[mu={_key(s)}]")
        rep = diagnose(scaled, budget)
        wit = witness(spec, recipe, grid)
        x = grid.nodes
        win = (x >= window[0]) & (x <= window[1])
        resid = float(np.nanmax(np.abs(wit.residual[win] - 1.0)))
        scan = omori_yau_scan(scaled, wit.u, n_levels, grid)
        vals = [r["value"] for r in scan if not r["empty"]]
        cases.append(SuiteCase(
            s, True, "", rep,
            claim_incomplete=rep.completeness["verdict"] == "incomplete",
            claim_l1_preserved=rep.l1_liouville["verdict"] == base.l1_liouville["verdict"],
            witness_residual=resid, omori_yau_min=min(vals) if vals else None,
            omori_yau=scan, witness=wit))
    return SuiteSummary(spec.label, False, "", base, cases)


def operator_for(spec: OperatorSpec, budget: Budget):
    """Assembled operator on the largest grid of the budget."""
    return assemble(spec, make_grid(spec, budget.R_max, budget.h))
