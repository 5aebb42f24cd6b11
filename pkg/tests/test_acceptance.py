"""Acceptance criteria, one test per criterion.

Every test records ``(passed, detail)`` in ``conftest.ACCEPTANCE``; the
terminal summary prints one PASS/FAIL line per criterion.  Tolerances and
runtime limits are the pinned values below and are never relaxed to make a
criterion pass.
"""
import time
from functools import lru_cache

import numpy as np
import pytest

from conftest import ACCEPTANCE
from stochlab import (
    MU_SET,
    Budget,
    HypothesisFailed,
    InfinitePotential,
    bounded_eigen_certificate,
    bump,
    chapman_kolmogorov_defect,
    coarse_validation,
    critical_hardy_from_measure,
    diagnose,
    dichotomy_check,
    feller_test,
    green_via_time,
    hardy_weight,
    kernel_slice,
    l1_liouville_verdict,
    make_grid,
    mass_curve,
    omori_yau_scan,
    oracle_agree,
    preset,
    rescale,
    rho_from_hardy,
    rho_from_measure,
    theorem54_table,
    witness,
)

# pinned tolerances
C1_REL = 0.03
C2_MIN_DEFECT, C2_STABILITY, C2_R = 0.05, 0.01, (20.0, 40.0, 80.0)
C3_SLOPE, C3_SLOPE_TOL = 2.0, 0.1
C4_RESIDUAL, C4_OY_MIN, C4_LEVELS, C4_WINDOW = 0.02, 0.9, 20, (0.5, 20.0)
C5_MARGIN, C5_TOL = 0.01, 5e-3
C6_DEFECT, C6_SHRINK = 0.02, 1.5
C7_KERNEL, C7_MASS = 0.05, 0.05
C8_W_FF, C8_INV_SQ = 0.03, 0.05
C9_ORDER = 1.5
C10_MIN_INSTANCES = 12

# runtime limits in seconds
LIMIT = {1: 60, 2: 180, 3: 120, 4: 60, 5: 120, 6: 60, 7: 300, 8: 120, 9: 60, 10: 900}

H, DT, T_MASS, WINDOW, TOL = 0.02, 1e-3, 1.0, (1.0, 5.0), 5e-3


def record(k, ok, detail, elapsed):
    ok = bool(ok) and elapsed < LIMIT[k]
    ACCEPTANCE[k] = (ok, f"{detail} [{elapsed:.1f}s, limit {LIMIT[k]}s]")
    return ok


def power(spec, p, label=None):
    return rescale(spec, lambda r, p=p: (1 + np.asarray(r, dtype=float) ** 2) ** p,
                   label=label or f"{spec.label}*rho[(1+r^2)^{p:g}]")


@lru_cache(maxsize=None)
def base(name, param):
    return preset(name, [param])


def catalog():
    e3, e5, h3 = base("euclidean_radial", 3), base("euclidean_radial", 5), \
        base("hyperbolic_radial", 3)
    return [e3, e5, h3, base("rapid_model", 1.5), base("rapid_model", 3),
            base("rapid_model", 4), base("drifted_line", 0.0), base("drifted_line", 1.0),
            power(e3, 2.0), power(e3, 0.5), power(e5, 2.0), power(h3, 2.0)]


@lru_cache(maxsize=None)
def recipe_case(n, s):
    """Inverse-measure recipe for ``euclidean_radial(n)`` and ``mu = (1+r^2)^-s``."""
    spec = base("euclidean_radial", n)
    grid = make_grid(spec, 40.0, H)
    try:
        rec = rho_from_measure(spec, MU_SET[s], grid)
    except (InfinitePotential, HypothesisFailed):
        return None
    scaled = rescale(spec, rec.rho, nodes=grid.nodes[1:], label=f"{spec.label}*rho[mu_{s:g}]")
    return spec, grid, rec, scaled


CASES = [(n, s) for n in (3, 5) for s in sorted(MU_SET)]


def mass_defect(spec, R):
    grid = make_grid(spec, R, H)
    curve = mass_curve(spec, grid, [T_MASS], DT)
    m = curve.at(T_MASS)[grid.window(*WINDOW)]
    return curve, 1.0 - float(np.max(m))


# ---------------------------------------------------------------------------

def test_criterion_1_green_rescaling():
    start = time.perf_counter()
    e3 = base("euclidean_radial", 3)
    scaled = power(e3, 2.0)
    grid = make_grid(e3, 40.0, H)
    y = grid.index_of(1.0)
    g = green_via_time(e3, grid, y, T_max=400.0, dt=DT).values
    gr = green_via_time(scaled, grid, y, T_max=400.0, dt=DT).values
    x = grid.nodes
    win = (x >= 0.5) & (x <= 10.0)
    rho_y = float(scaled.rho(np.array([x[y]]))[0])
    err = float(np.max(np.abs(gr[win] * rho_y - g[win]) / g[win]))
    ok = record(1, err <= C1_REL, f"max rel |G_rho rho(y) - G| on [0.5,10] = {err:.2e} "
                f"(tol {C1_REL})", time.perf_counter() - start)
    assert ok, ACCEPTANCE[1]


def test_criterion_2_rescaled_specs_are_incomplete():
    start = time.perf_counter()
    lines, ok_all, slow = [], True, 0.0
    for n, s in CASES:
        t0 = time.perf_counter()
        case = recipe_case(n, s)
        if case is None:
            lines.append(f"n={n},s={s:g}: not admissible")
            continue
        scaled = case[3]
        defects = []
        verdict = None
        for R in C2_R:
            curve, d = mass_defect(scaled, R)
            defects.append(d)
            if R == 40.0:
                verdict = dichotomy_check(curve, T_MASS, TOL, WINDOW)
        spread = (max(defects) - min(defects)) / defects[-1]
        fel = feller_test(scaled).verdict
        ok = (verdict == "all_below_one" and min(defects) >= C2_MIN_DEFECT
              and spread <= C2_STABILITY and fel == "explosive")
        ok_all &= ok
        slow = max(slow, time.perf_counter() - t0)
        lines.append(f"n={n},s={s:g}: {verdict}, defect(R=20/40/80)="
                     f"{'/'.join(f'{d:.4f}' for d in defects)}, spread={spread:.2%}, "
                     f"feller={fel}{'' if ok else ' <- FAIL'}")
    ok = record(2, ok_all and slow < LIMIT[2], "; ".join(lines), time.perf_counter() - start)
    assert ok, ACCEPTANCE[2]


def test_criterion_3_l1_verdict_preserved():
    start = time.perf_counter()
    b = Budget()
    lines, ok_all = [], True
    base_verdicts = {}
    for n in (3, 5):
        v, rec = l1_liouville_verdict(base("euclidean_radial", n), b.y, b.R_schedule, b.h)
        base_verdicts[n] = v
        lines.append(f"base n={n}: {v}, slope {rec['slope']:.3f}")
        if n == 3:
            ok_all &= v == "L1-Liouville" and abs(rec["slope"] - C3_SLOPE) <= C3_SLOPE_TOL
    for n, s in CASES:
        case = recipe_case(n, s)
        if case is None:
            continue
        v, _ = l1_liouville_verdict(case[3], b.y, b.R_schedule, b.h)
        ok_all &= v == base_verdicts[n]
        lines.append(f"n={n},s={s:g}: {v}")
    ok = record(3, ok_all, "; ".join(lines), time.perf_counter() - start)
    assert ok, ACCEPTANCE[3]


def test_criterion_4_witness_and_omori_yau():
    start = time.perf_counter()
    lines, ok_all = [], True
    for n, s in CASES:
        case = recipe_case(n, s)
        if case is None:
            continue
        spec, grid, rec, scaled = case
        wit = witness(spec, rec, grid)
        x = grid.nodes
        win = (x >= C4_WINDOW[0]) & (x <= C4_WINDOW[1])
        resid = float(np.max(np.abs(wit.residual[win] - 1.0)))
        scan = omori_yau_scan(scaled, wit.u, C4_LEVELS, grid)
        vals = [r["value"] for r in scan if not r["empty"]]
        oy = min(vals) if len(vals) == C4_LEVELS else -np.inf
        ok_all &= resid <= C4_RESIDUAL and oy >= C4_OY_MIN
        lines.append(f"n={n},s={s:g}: residual {resid:.1e}, OY min {oy:.4f}")
    ok = record(4, ok_all, "; ".join(lines), time.perf_counter() - start)
    assert ok, ACCEPTANCE[4]


def test_criterion_5_certificate_biconditional():
    start = time.perf_counter()
    lines, ok_all = [], True
    for spec in catalog():
        grid = make_grid(spec, 40.0, H)
        curve = mass_curve(spec, grid, [T_MASS], DT)
        verdict = dichotomy_check(curve, T_MASS, TOL, WINDOW)
        cert = bounded_eigen_certificate(spec, 1.0, grid, DT, WINDOW)
        positive = cert.meta["w_min"] >= C5_MARGIN
        ok = positive == (verdict == "all_below_one")
        if verdict == "all_equal_one":
            ok &= cert.meta["w_max"] <= C5_TOL
        ok_all &= ok
        lines.append(f"{spec.label}: {verdict}, w in [{cert.meta['w_min']:.2e}, "
                     f"{cert.meta['w_max']:.2e}]{'' if ok else ' <- FAIL'}")
    ok = record(5, ok_all, "; ".join(lines), time.perf_counter() - start)
    assert ok, ACCEPTANCE[5]


def test_criterion_6_chapman_kolmogorov():
    start = time.perf_counter()
    e3 = base("euclidean_radial", 3)
    grid = make_grid(e3, 40.0, H)
    defects = []
    for dt in (DT, DT / 2):
        sl = kernel_slice(e3, grid, grid.index_of(1.0), [0.5, 1.0], dt)
        defects.append(chapman_kolmogorov_defect(sl, 0.5, 0.5))
    shrink = defects[0] / defects[1] if defects[1] > 0 else np.inf
    ok = record(6, defects[0] <= C6_DEFECT and shrink >= C6_SHRINK,
                f"defect {defects[0]:.2e} (tol {C6_DEFECT}), dt-halving shrink {shrink:.2f}x "
                f"(need {C6_SHRINK}x)", time.perf_counter() - start)
    assert ok, ACCEPTANCE[6]


# component truths for the product matrix, not read from the numerics
TRUTH = {
    "rapid3": ("subcritical", "incomplete", "not L1-Liouville"),
    "rapid4": ("subcritical", "incomplete", "not L1-Liouville"),
    "e3": ("subcritical", "complete", "L1-Liouville"),
    "e3x": ("subcritical", "incomplete", "L1-Liouville"),
    "line0": ("critical", "complete", "L1-Liouville"),
    "h3": ("subcritical", "complete", "L1-Liouville"),
}
PAIRS = {
    ("rapid3", "e3"): ("subcritical", "incomplete", "not L1-Liouville"),
    ("e3", "e3"): ("subcritical", "complete", "L1-Liouville"),
    ("e3x", "e3"): ("subcritical", "incomplete", "L1-Liouville"),
    ("e3", "line0"): ("subcritical", "complete", "L1-Liouville"),
    ("line0", "line0"): ("undetermined", "complete", "L1-Liouville"),
    ("h3", "rapid4"): ("subcritical", "incomplete", "not L1-Liouville"),
}


def test_criterion_7_skew_products():
    start = time.perf_counter()
    e3 = base("euclidean_radial", 3)
    specs = {"rapid3": base("rapid_model", 3), "rapid4": base("rapid_model", 4), "e3": e3,
             "e3x": power(e3, 2.0), "line0": base("drifted_line", 0.0),
             "h3": base("hyperbolic_radial", 3)}
    lines, ok_all = [], True
    for a, b in (("e3", "e3"), ("e3x", "e3"), ("rapid3", "e3")):
        out = coarse_validation(specs[a], specs[b])
        k, m = max(out["kernel_defect"]), max(out["mass_defect"])
        ok_all &= k <= C7_KERNEL and m <= C7_MASS
        lines.append(f"2-D {a}x{b}: kernel {k:.2e}, mass {m:.2e}")
    reports = {}
    for key, spec in specs.items():
        reports[key] = diagnose(spec, Budget())
        if reports[key].verdicts != TRUTH[key]:
            ok_all = False
            lines.append(f"{key} diagnosed {reports[key].verdicts} <- FAIL")
    matched = 0
    for (a, b), expected in PAIRS.items():
        t = theorem54_table(reports[a], reports[b])
        got = tuple(t.product_verdicts[k]["verdict"]
                    for k in ("subcritical", "complete", "l1_liouville"))
        matched += got == expected
        if got != expected:
            lines.append(f"table {a}x{b}: {got} expected {expected} <- FAIL")
    ok_all &= matched == len(PAIRS)
    lines.append(f"verdict table {matched}/{len(PAIRS)} pairs match")
    ok = record(7, ok_all, "; ".join(lines), time.perf_counter() - start)
    assert ok, ACCEPTANCE[7]


@lru_cache(maxsize=None)
def hardy_case():
    e3 = base("euclidean_radial", 3)
    grid = make_grid(e3, 40.0, H)
    hw = hardy_weight(e3, bump(1.0), grid, 1.0)
    rec = rho_from_hardy(hw)
    scaled = rescale(e3, rec.rho, nodes=grid.nodes[1:], label="e3*rho[hardy]")
    return e3, grid, hw, rec, scaled


def test_criterion_8_hardy_route():
    start = time.perf_counter()
    e3, grid, hw, rec, scaled = hardy_case()
    x = grid.nodes
    beyond = (x > hw.support_cutoff) & (x <= 0.9 * grid.R) & np.isfinite(hw.W_ff)
    w_ff = float(np.max(np.abs(hw.W[beyond] - hw.W_ff[beyond]) / hw.W[beyond]))
    far = (x >= 5) & (x <= 0.5 * grid.R)
    inv = float(np.max(np.abs(hw.W[far] * 4 * x[far] ** 2 - 1)))
    fel = feller_test(scaled).verdict
    curve = mass_curve(scaled, grid, [T_MASS], DT)
    dich = dichotomy_check(curve, T_MASS, TOL, WINDOW)
    ok = record(8, w_ff <= C8_W_FF and inv <= C8_INV_SQ and fel == "explosive"
                and dich == "all_below_one",
                f"|W-W_ff|/W beyond supp = {w_ff:.2e}, |4r^2 W - 1| on [5,20] = {inv:.2e}, "
                f"feller {fel}, mass {dich}, rho far exponent "
                f"{rec.provenance['far_exponent']:.3f}", time.perf_counter() - start)
    assert ok, ACCEPTANCE[8]


def test_criterion_9_critical_weight_identity():
    start = time.perf_counter()
    lines, ok_all = [], True
    for n in (3, 5):
        spec = base("euclidean_radial", n)
        res = []
        for h in (H, H / 2):
            grid = make_grid(spec, 40.0, h)
            out = critical_hardy_from_measure(spec, MU_SET[2.0], grid)
            res.append(float(np.max(np.abs(out["residual"][grid.window(1.0, 20.0)]))))
        order = float(np.log2(res[0] / res[1]))
        ok_all &= order >= C9_ORDER
        lines.append(f"n={n}: residual {res[0]:.2e} -> {res[1]:.2e}, order {order:.2f}")
    ok = record(9, ok_all, "; ".join(lines), time.perf_counter() - start)
    assert ok, ACCEPTANCE[9]


def test_criterion_10_master_cross_validation():
    start = time.perf_counter()
    instances = list(catalog())
    for n, s in CASES:
        case = recipe_case(n, s)
        if case is not None:
            instances.append(case[3])
    instances.append(hardy_case()[4])
    bad = []
    for spec in instances:
        grid = make_grid(spec, 40.0, H)
        curve = mass_curve(spec, grid, [T_MASS], DT)
        rep = feller_test(spec)
        if oracle_agree(rep, curve, T_MASS, TOL, WINDOW) is not True:
            bad.append(f"{spec.label} ({rep.verdict} vs "
                       f"{dichotomy_check(curve, T_MASS, TOL, WINDOW)})")
    ok = record(10, not bad and len(instances) >= C10_MIN_INSTANCES,
                f"{len(instances) - len(bad)}/{len(instances)} instances agree"
                + (f"; disagree: {', '.join(bad)}" if bad else ""),
                time.perf_counter() - start)
    assert ok, ACCEPTANCE[10]
