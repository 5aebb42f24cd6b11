import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stochlab.expr import Expression, ExpressionError, parse_positive


@pytest.mark.parametrize("text, f", [
    ("(1+r^2)^2", lambda r: (1 + r**2) ** 2),
    ("(1+r**2)^(-1.5)", lambda r: (1 + r**2) ** -1.5),
    ("exp(r) * 2", lambda r: 2 * np.exp(r)),
    ("-r + 3", lambda r: 3 - r),
    ("sqrt(1 + r) / pi", lambda r: np.sqrt(1 + r) / np.pi),
    ("4", lambda r: 4 + 0 * r),
    ("cosh(r) - sinh(r)", lambda r: np.exp(-r)),
])
def test_evaluation(text, f):
    r = np.linspace(0, 3, 7)
    np.testing.assert_allclose(Expression(text)(r), f(r), rtol=1e-12)


@pytest.mark.parametrize("text", [
    "(1+r", "", "r.real", "__import__('os')", "x + 1", "r[0]", "lambda: 1", "exp(r, 2)",
    "'a'", "True", "open('f')", "r if r else 1",
])
def test_rejected(text):
    with pytest.raises(ExpressionError):
        Expression(text)


def test_positivity_check():
    r = np.linspace(0, 5, 11)
    parse_positive("1 + r^2", r)
    with pytest.raises(ExpressionError):
        parse_positive("r - 1", r)
    with pytest.raises(ExpressionError):
        parse_positive("1/r", r)


@settings(max_examples=60)
@given(st.floats(-5, 5), st.floats(0.01, 5))
def test_power_form(p, r):
    val = Expression(f"(1+r^2)^({p!r})")(np.array([r]))[0]
    assert val == pytest.approx((1 + r * r) ** p, rel=1e-12)
