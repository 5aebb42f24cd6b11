import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stochlab import preset, rescale, symmetric_compatible, symmetric_residual, with_density
from stochlab.feller import feller_test
from stochlab.model import probe_nodes


def test_euclidean_coefficients(e3):
    r = np.array([0.5, 1.0, 4.0])
    np.testing.assert_allclose(e3.coeffs.b(r), -2 / r)
    np.testing.assert_allclose(e3.coeffs.v(r), r**2)
    np.testing.assert_allclose(e3.coeffs.a(r), 1.0)
    assert e3.coeffs.left_boundary == "regular_reflecting"


@pytest.mark.parametrize("name, param", [
    ("euclidean_radial", 3), ("euclidean_radial", 5), ("hyperbolic_radial", 3),
    ("rapid_model", 3), ("rapid_model", 1.5), ("drifted_line", 0.0), ("drifted_line", 1.0),
])
def test_presets_are_symmetric_compatible(name, param):
    assert symmetric_compatible(preset(name, [param]))


def test_hyperbolic_density():
    spec = preset("hyperbolic_radial", [3])
    r = np.array([0.5, 2.0, 30.0])
    np.testing.assert_allclose(spec.coeffs.log_v(r), 2 * np.log(np.sinh(r)), rtol=1e-12)


def test_rapid_density_never_overflows():
    spec = preset("rapid_model", [3])
    assert np.isfinite(spec.coeffs.log_v(np.array([200.0])))[0]
    # flattened on [0, 1]: v = 1 at the pole
    assert spec.coeffs.log_v(np.array([0.0]))[0] == 0.0


def test_unit_density_breaks_symmetry(e3):
    flat = with_density(e3, lambda r: np.zeros_like(np.asarray(r, dtype=float)),
                        lambda r: np.zeros_like(np.asarray(r, dtype=float)))
    assert not symmetric_compatible(flat)
    r = np.array([1.0, 2.0])
    np.testing.assert_allclose(symmetric_residual(flat, r), -2 / r)


@pytest.mark.parametrize("name, params", [
    ("euclidean_radial", [2]), ("euclidean_radial", [3.5]), ("rapid_model", [0]),
    ("nonsense", [1]), ("euclidean_radial", []),
])
def test_bad_presets(name, params):
    with pytest.raises(ValueError):
        preset(name, params)


def test_rescale_multiplies_rho_and_keeps_coefficients(e3):
    scaled = rescale(e3, lambda r: 1 + np.asarray(r) ** 2)
    r = np.linspace(0.1, 5, 7)
    np.testing.assert_allclose(scaled.rho(r), 1 + r**2)
    assert scaled.coeffs is e3.coeffs
    twice = rescale(scaled, 2.0)
    np.testing.assert_allclose(twice.rho(r), 2 * (1 + r**2))
    assert len(twice.history) == 2


def test_rescale_rejects_nonpositive(e3):
    with pytest.raises(ValueError):
        rescale(e3, lambda r: np.asarray(r) - 1.0)
    with pytest.raises(ValueError):
        rescale(e3, 0.0)


@pytest.mark.parametrize("power, verdict", [(2.0, "explosive"), (0.5, "conservative")])
def test_rescaled_feller_verdicts(e3, power, verdict):
    scaled = rescale(e3, lambda r: (1 + np.asarray(r) ** 2) ** power)
    assert feller_test(scaled).verdict == verdict


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(0.1, 50.0))
def test_apply_matches_formula(c, r):
    spec = rescale(preset("euclidean_radial", [3]), c)
    # u = r^2: -u'' + b u' = -2 - 4 = -6 in three dimensions
    val = spec.apply(r**2, 2 * r, 2.0, np.array([r]))
    np.testing.assert_allclose(val, -6 * c, rtol=1e-12)


def test_probe_nodes_cover_the_line():
    line = preset("drifted_line", [1.0])
    x = probe_nodes(line)
    assert x[0] < 0 < x[-1]
