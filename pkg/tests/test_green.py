import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stochlab import (
    CriticalSpecError,
    assemble,
    comparability,
    criticality_closed_form,
    green_closed_form,
    green_direct,
    green_potential,
    green_via_time,
    l1_liouville_verdict,
    make_grid,
    preset,
    rescale,
)
from stochlab.green import classify_growth, green_mass, scale_integrals


@pytest.fixture(scope="module")
def grid40(e3):
    return make_grid(e3, 40.0, 0.02)


def test_three_dimensional_green_function(e3, grid40):
    g = green_closed_form(e3, grid40.index_of(1.0), grid40)
    assert g.values[grid40.index_of(2.0)] == pytest.approx(0.5, rel=1e-8)
    x = grid40.nodes[1:]
    np.testing.assert_allclose(g.values[1:], 1 / np.maximum(x, 1.0), rtol=1e-8)


def test_five_dimensional_green_function(e5):
    grid = make_grid(e5, 20.0, 0.02)
    g = green_closed_form(e5, grid.index_of(1.0), grid)
    assert g.values[grid.index_of(1.0)] == pytest.approx(1 / 3, rel=1e-8)


def test_closed_form_rescaling_identity(e3, e3_explosive, grid40):
    y = grid40.index_of(1.0)
    g = green_closed_form(e3, y, grid40).values
    gr = green_closed_form(e3_explosive, y, grid40).values
    assert gr[grid40.index_of(2.0)] == pytest.approx(0.5 / 4.0, rel=1e-8)
    np.testing.assert_allclose(gr * 4.0, g, rtol=1e-12)


def test_direct_route_matches_truncated_closed_form(e3):
    grid = make_grid(e3, 10.0, 0.02)
    y = grid.index_of(1.0)
    direct = green_direct(e3, grid, y).values
    exact = green_closed_form(e3, y, grid, truncated=True).values
    np.testing.assert_allclose(direct[1:-1], exact[1:-1], rtol=2e-3)


@pytest.mark.parametrize("name, param", [("hyperbolic_radial", 3), ("drifted_line", 1.0)])
def test_direct_route_other_presets(name, param):
    spec = preset(name, [param])
    grid = make_grid(spec, 8.0, 0.02)
    y = grid.index_of(1.0)
    direct = green_direct(spec, grid, y).values
    exact = green_closed_form(spec, y, grid, truncated=True).values
    keep = exact > 1e-3 * exact.max()
    np.testing.assert_allclose(direct[keep], exact[keep], rtol=5e-3)


def test_time_route_converges_to_the_direct_solve(e3):
    grid = make_grid(e3, 10.0, 0.02)
    y = grid.index_of(1.0)
    t = green_via_time(e3, grid, y, T_max=100.0, dt=1e-3)
    d = green_direct(e3, grid, y).values
    keep = d > 1e-3
    assert np.max(np.abs(t.values[keep] - d[keep]) / d[keep]) < 1e-3


def test_critical_spec_has_no_green_function():
    line = preset("drifted_line", [0.0])
    grid = make_grid(line, 10.0, 0.05)
    assert criticality_closed_form(line, grid) == "critical"
    with pytest.raises(CriticalSpecError):
        green_closed_form(line, grid.index_of(0.0), grid)
    assert criticality_closed_form(preset("drifted_line", [0.5]), grid) == "subcritical"


def test_time_route_criticality_verdicts(e3):
    line = preset("drifted_line", [0.0])
    grid = make_grid(line, 40.0, 0.05)
    assert green_via_time(line, grid, grid.index_of(1.0), 100.0, 1e-2).verdict == "critical"
    grid = make_grid(e3, 40.0, 0.05)
    assert green_via_time(e3, grid, grid.index_of(1.0), 100.0, 1e-2).verdict == "subcritical"


def test_scale_integrals_tail_exponent(e3, grid40):
    sc = scale_integrals(e3, grid40)
    assert sc.plus_finite and not sc.minus_finite
    assert sc.plus_exponent == pytest.approx(-2.0, abs=0.05)


def test_potential_of_decaying_density(e3, grid40):
    gp = green_potential(e3, grid40, lambda r: (1 + np.asarray(r) ** 2) ** -2.0)
    assert gp.finite
    x = grid40.nodes
    # closed form: int G(x,y) y^2 (1+y^2)^-2 dy = atan(x) / (2x)
    with np.errstate(invalid="ignore", divide="ignore"):
        exact = np.where(x > 0, np.arctan(x) / (2 * np.where(x > 0, x, 1)), 0.5)
    np.testing.assert_allclose(gp.values, exact, rtol=1e-5)
    assert gp.values[-1] < 0.05 * gp.values[0]


def test_lebesgue_density_has_infinite_potential(e3, grid40):
    assert not green_potential(e3, grid40, lambda r: np.ones_like(np.asarray(r))).finite


def test_potential_rejects_negative_density(e3, grid40):
    with pytest.raises(ValueError):
        green_potential(e3, grid40, lambda r: np.sin(np.asarray(r)))


def test_comparability_constants(e3, grid40):
    gp = green_potential(e3, grid40, lambda r: (1 + np.asarray(r) ** 2) ** -2.0)
    g = green_closed_form(e3, grid40.index_of(1.0), grid40)
    c = comparability(gp, g, 0.5)
    assert 0 < c["c_low"] <= c["c_high"] < np.inf
    with pytest.raises(ValueError):
        comparability(gp, g, 0.0)


def test_green_mass_growth_in_three_dimensions(e3):
    verdict, rec = l1_liouville_verdict(e3, 1.0, [10, 20, 40], 0.02)
    assert verdict == "L1-Liouville"
    assert rec["slope"] == pytest.approx(2.0, abs=0.1)
    # Dirichlet Green function 1/max(x,1) - 1/R against r^2 dr: (R^2 - 1)/6
    np.testing.assert_allclose(rec["I"], [(R**2 - 1) / 6 for R in (10, 20, 40)], rtol=1e-3)


def test_rapid_model_is_not_l1_liouville(rapid3):
    verdict, rec = l1_liouville_verdict(rapid3, 1.0, [5, 10, 20], 0.02)
    assert verdict == "not L1-Liouville"


def test_green_mass_matches_direct_sum(e3):
    grid = make_grid(e3, 10.0, 0.05)
    op = assemble(e3, grid)
    y = grid.index_of(1.0)
    col = green_direct(e3, grid, y, op=op).values
    assert green_mass(op, y) == pytest.approx(np.sum(col * np.exp(op.log_w)), rel=1e-10)


@pytest.mark.parametrize("I, verdict", [
    ([1.0, 4.0, 16.0], "L1-Liouville"),
    ([1.0, 1.001, 1.0011], "not L1-Liouville"),
    ([1.0, 1.1, 1.12], "not L1-Liouville"),      # geometric increments, small remainder
    ([1.0, 1.02, 1.04], "L1-Liouville"),         # non-decaying increments
    ([1.0, 1.02], "inconclusive"),
    ([1.0], "inconclusive"),
])
def test_classify_growth(I, verdict):
    R = [10.0, 20.0, 40.0][: len(I)]
    assert classify_growth(R, I)[0] == verdict


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 50.0))
def test_constant_rescaling_divides_green(c):
    e3 = preset("euclidean_radial", [3])
    grid = make_grid(e3, 10.0, 0.05)
    y = grid.index_of(1.0)
    base = green_direct(e3, grid, y).values
    scaled = green_direct(rescale(e3, c), grid, y).values
    np.testing.assert_allclose(scaled * c, base, rtol=1e-9, atol=1e-14)
