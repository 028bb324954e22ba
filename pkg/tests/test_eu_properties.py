import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppf import DiscreteRandomVariable, MultiUtility, WeightingFunction, mixed_eu, possibilistic_eu, trapezoidal, triangular

F = WeightingFunction.power(1)


@st.composite
def fuzzy(draw):
    c = draw(st.floats(-2, 2))
    lw, rw = draw(st.floats(0, 1)), draw(st.floats(0, 1))
    if draw(st.booleans()):
        return triangular(c, lw, rw)
    return trapezoidal(c, c + draw(st.floats(0, 1)), lw, rw)


@st.composite
def discrete(draw):
    vals = draw(st.lists(st.floats(-2, 2), min_size=1, max_size=5))
    p = np.array(draw(st.lists(st.floats(0.05, 1), min_size=len(vals), max_size=len(vals))))
    p = p / p.sum()
    return DiscreteRandomVariable(tuple(vals), tuple(p.tolist()))


coeffs = st.lists(st.floats(-2, 2), min_size=6, max_size=6)


def poly2(c):
    return lambda x, y: c[0] + c[1] * x + c[2] * y + c[3] * x * y + c[4] * x * x + c[5] * y**3


@settings(max_examples=100)
@given(fuzzy(), fuzzy(), coeffs, coeffs, st.floats(-3, 3), st.floats(-3, 3))
def test_linearity_in_utility(A, B, cg, ch, a, b):
    g, h = poly2(cg), poly2(ch)
    u = MultiUtility(2, lambda x, y: a * g(x, y) + b * h(x, y))
    lhs = possibilistic_eu(F, u, [A, B])
    rhs = a * possibilistic_eu(F, MultiUtility(2, g), [A, B]) + b * possibilistic_eu(F, MultiUtility(2, h), [A, B])
    assert lhs == pytest.approx(rhs, abs=1e-10)


@settings(max_examples=100)
@given(fuzzy(), discrete(), coeffs, coeffs, st.floats(-3, 3), st.floats(-3, 3))
def test_mixed_linearity_in_utility(A, X, cg, ch, a, b):
    g, h = poly2(cg), poly2(ch)
    u = MultiUtility(2, lambda x, y: a * g(x, y) + b * h(x, y))
    lhs = mixed_eu(F, u, [A], [X])
    rhs = a * mixed_eu(F, MultiUtility(2, g), [A], [X]) + b * mixed_eu(F, MultiUtility(2, h), [A], [X])
    assert lhs == pytest.approx(rhs, abs=1e-10)


@settings(max_examples=100)
@given(fuzzy(), st.floats(0, 2))
def test_monotone_in_utility(A, shift):
    u = MultiUtility(1, np.sin)
    v = MultiUtility(1, lambda x: np.sin(x) + shift * x * x)
    assert possibilistic_eu(F, u, [A]) <= possibilistic_eu(F, v, [A]) + 1e-12


@settings(max_examples=50)
@given(fuzzy(), fuzzy())
def test_one_and_two_argument_paths_agree(A, B):
    # a two-argument utility that ignores its second argument
    one = possibilistic_eu(F, MultiUtility(1, np.exp), [A])
    two = possibilistic_eu(F, MultiUtility(2, lambda x, y: np.exp(x)), [A, B])
    assert one == pytest.approx(two, abs=1e-12)
