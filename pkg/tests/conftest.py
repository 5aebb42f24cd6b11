import numpy as np
import pytest

from stochlab import preset, rescale

# criterion number -> (passed, detail), filled by test_acceptance.py
ACCEPTANCE = {}


def e3_rho2():
    return rescale(preset("euclidean_radial", [3]), lambda r: (1 + np.asarray(r) ** 2) ** 2,
                   label="e3*rho[(1+r^2)^2]")


@pytest.fixture(scope="session")
def e3():
    return preset("euclidean_radial", [3])


@pytest.fixture(scope="session")
def e5():
    return preset("euclidean_radial", [5])


@pytest.fixture(scope="session")
def rapid3():
    return preset("rapid_model", [3])


@pytest.fixture(scope="session")
def e3_explosive():
    return e3_rho2()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        tr.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
