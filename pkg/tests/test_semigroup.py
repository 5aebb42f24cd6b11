import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stochlab import (
    assemble,
    chapman_kolmogorov_defect,
    dichotomy_check,
    evolve,
    kernel_slice,
    make_grid,
    mass_curve,
    preset,
)
from stochlab.semigroup import Stepper, delta


@pytest.fixture(scope="module")
def e3_grid(e3):
    return make_grid(e3, 40.0, 0.02)


def test_brownian_motion_is_conservative(e3, e3_grid):
    op = assemble(e3, e3_grid)
    m = evolve(op, np.ones(e3_grid.n + 1), 1.0, 1e-3)
    assert m[e3_grid.index_of(2.0)] >= 0.999


def test_evolve_partial_step_and_errors(e3):
    g = make_grid(e3, 10.0, 0.05)
    op = assemble(e3, g)
    f = np.exp(-g.nodes**2)
    a = evolve(op, f, 0.0105, 1e-3)
    b = evolve(op, f, 0.0100, 1e-3)
    assert a.shape == f.shape and a[-1] == 0.0
    assert 0 < np.max(np.abs(a - b)) < 1e-2
    with pytest.raises(ValueError):
        evolve(op, f, -1.0, 1e-3)
    with pytest.raises(ValueError):
        Stepper(op, 0.0)


def test_mass_dichotomy(e3, e3_explosive, e3_grid):
    m = mass_curve(e3, e3_grid, [1.0], 1e-3)
    assert np.all(m.at(1.0)[e3_grid.window(1, 5)] >= 0.999)
    assert dichotomy_check(m, 1.0, 5e-3) == "all_equal_one"
    me = mass_curve(e3_explosive, e3_grid, [1.0], 1e-3)
    assert np.all(me.at(1.0)[e3_grid.window(1, 5)] <= 0.9)
    assert dichotomy_check(me, 1.0, 5e-3, (1, 5)) == "all_below_one"


def test_violated_dichotomy_is_reported(e3):
    # a small truncation keeps full mass near the pole but drains the rest
    g = make_grid(e3, 10.0, 0.05)
    m = mass_curve(e3, g, [1.0], 1e-3)
    assert dichotomy_check(m, 1.0, 5e-3) == "violated"


def test_mass_is_submarkov_and_monotone_in_time(e3_explosive):
    g = make_grid(e3_explosive, 20.0, 0.05)
    m = mass_curve(e3_explosive, g, [0.25, 0.5, 1.0], 1e-3)
    assert np.all(m.values >= -1e-14) and np.all(m.values <= 1 + 1e-12)
    assert np.all(np.diff(m.values, axis=1) <= 1e-12)


def test_mass_grows_under_exhaustion(e3):
    vals = []
    for R in (5.0, 10.0, 20.0):
        g = make_grid(e3, R, 0.05)
        vals.append(mass_curve(e3, g, [1.0], 1e-3).at(1.0)[g.index_of(2.0)])
    assert vals[0] <= vals[1] <= vals[2]


def test_times_must_increase(e3):
    g = make_grid(e3, 10.0, 0.1)
    with pytest.raises(ValueError):
        mass_curve(e3, g, [1.0, 0.5], 1e-3)


def test_kernel_is_a_probability_density(e3):
    g = make_grid(e3, 20.0, 0.05)
    sl = kernel_slice(e3, g, g.index_of(1.0), [0.5], 1e-3)
    w = np.exp(sl.op.log_w)
    assert np.sum(sl.at(0.5) * w) == pytest.approx(1.0, abs=1e-4)
    assert np.all(sl.at(0.5) >= 0)


def test_kernel_against_three_dimensional_gaussian(e3):
    # radial heat kernel of -Laplacian on R^3 (measure r^2 dr, no 4 pi)
    g = make_grid(e3, 20.0, 0.02)
    y = g.index_of(1.0)
    sl = kernel_slice(e3, g, y, [1.0], 5e-4)
    x = g.nodes[g.window(0.5, 3)]
    t = 1.0
    exact = 4 * np.pi * (4 * np.pi * t) ** -1.5 * np.exp(-(x**2 + 1) / (4 * t)) \
        * np.sinh(x / (2 * t)) / (x / (2 * t))
    got = sl.at(1.0)[g.window(0.5, 3)]
    assert np.max(np.abs(got - exact) / exact) < 0.01


def test_delta_rejects_boundary_nodes(e3):
    op = assemble(e3, make_grid(e3, 10.0, 0.1))
    with pytest.raises(ValueError):
        delta(op, 0)
    with pytest.raises(ValueError):
        delta(op, op.grid.n)


def test_chapman_kolmogorov(e3):
    g = make_grid(e3, 40.0, 0.02)
    sl = kernel_slice(e3, g, g.index_of(1.0), [0.5, 1.0], 1e-3)
    assert chapman_kolmogorov_defect(sl, 0.5, 0.5) <= 0.02
    assert chapman_kolmogorov_defect(sl, 0.0, 0.5) == 0.0


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 3.0), st.sampled_from(["euclidean_radial", "hyperbolic_radial"]))
def test_positivity_preserved(t, name):
    spec = preset(name, [3])
    g = make_grid(spec, 10.0, 0.1)
    op = assemble(spec, g)
    f = np.abs(np.sin(3 * g.nodes))
    assert np.all(evolve(op, f, t, 0.01) >= 0)
