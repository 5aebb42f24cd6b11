import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stochlab import feller_test, make_grid, mass_curve, oracle_agree, preset, rescale


def _power(spec, p):
    return rescale(spec, lambda r: (1 + np.asarray(r) ** 2) ** p)


@pytest.mark.parametrize("n, p, kappa", [
    # int_1^inf (s(inf)-s) m' dx with s' = x^{1-n}, m' = x^{n-1} / rho
    (3, 2.0, 1 / 4),
    (3, 1.5, 1 / np.sqrt(2)),
    (5, 2.0, 1 / 12),
])
def test_kappa_closed_forms(n, p, kappa):
    rep = feller_test(_power(preset("euclidean_radial", [n]), p))
    assert rep.verdict == "explosive"
    assert rep.kappa == pytest.approx(kappa, rel=1e-3)


@pytest.mark.parametrize("spec_args, p", [
    (("euclidean_radial", 3), None),
    (("euclidean_radial", 3), 0.5),
    (("hyperbolic_radial", 3), None),
    (("drifted_line", 0.0), None),
])
def test_conservative_cases(spec_args, p):
    spec = preset(spec_args[0], [spec_args[1]])
    if p is not None:
        spec = _power(spec, p)
    rep = feller_test(spec)
    assert rep.verdict == "conservative" and not rep.explosive
    assert np.isinf(rep.kappa)


@pytest.mark.parametrize("alpha", [2.5, 3.0, 4.0])
def test_rapid_model_explodes(alpha):
    rep = feller_test(preset("rapid_model", [alpha]))
    assert rep.explosive and 0 < rep.kappa < np.inf


def test_rapid_model_kappa_reference():
    # independent quadrature: for large x, g = (s(inf)-s)/s' ~ 1/(3x^2), integrand g
    assert feller_test(preset("rapid_model", [3])).kappa == pytest.approx(0.2999, rel=2e-3)


def test_quadratic_growth_is_the_borderline(e3):
    # rho = 1 + r^2 makes the integrand ~ 1/x, inside the inconclusive band
    rep = feller_test(_power(e3, 1.0))
    assert rep.verdict == "inconclusive"
    assert rep.meta["integrand_exponent"] == pytest.approx(-1.0, abs=0.01)


def test_densities_are_consistent(e3):
    rep = feller_test(_power(e3, 2.0))
    x = rep.nodes
    np.testing.assert_allclose(rep.scale_density, (x / x[0]) ** -2, rtol=1e-8)
    np.testing.assert_allclose(rep.speed_density * rep.scale_density * (1 + x**2) ** 2, 1.0,
                               rtol=1e-8)


def test_bad_quadrature_range(e3):
    with pytest.raises(ValueError):
        feller_test(e3, c=1.0, R_quad=5.0)


def test_oracle_agreement_with_the_mass_curve(e3, e3_explosive):
    grid = make_grid(e3, 40.0, 0.02)
    for spec in (e3, e3_explosive):
        curve = mass_curve(spec, grid, [1.0], 1e-3)
        assert oracle_agree(feller_test(spec), curve, window=(1, 5)) is True
    # crossed pairs disagree
    curve = mass_curve(e3, grid, [1.0], 1e-3)
    assert oracle_agree(feller_test(e3_explosive), curve, window=(1, 5)) is False


def test_inconclusive_oracle_never_blocks(e3):
    rep = feller_test(e3)
    rep.verdict = "inconclusive"
    assert oracle_agree(rep, "all_equal_one") is None


@settings(max_examples=15, deadline=None)
@given(st.floats(1.2, 4.0))
def test_superquadratic_power_explodes(p):
    # kappa = int_1^inf x (1+x^2)^-p dx = 2^{1-p} / (2 (p-1))
    rep = feller_test(_power(preset("euclidean_radial", [3]), p))
    assert rep.verdict == "explosive"
    assert rep.kappa == pytest.approx(2 ** (1 - p) / (2 * (p - 1)), rel=2e-2)


def test_multiplier_covariance(e3):
    rho = lambda r: 2.0 + np.sin(np.asarray(r)) ** 2  # noqa: E731
    base, scaled = feller_test(e3), feller_test(rescale(e3, rho))
    np.testing.assert_allclose(scaled.log_scale_density, base.log_scale_density)
    np.testing.assert_allclose(scaled.speed_density * rho(base.nodes), base.speed_density,
                               rtol=1e-12)
