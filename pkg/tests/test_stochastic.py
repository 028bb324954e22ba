import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ppf import DiscreteRandomVariable, DomainError, ValidationError, discretize_normal, expectation


def test_fair_coin_moments():
    X = DiscreteRandomVariable((-1.0, 1.0), (0.5, 0.5))
    assert X.mean() == 0.0
    assert X.second_moment_about(0.0) == 1.0
    assert X.second_moment_about(1.0) == 2.0


def test_from_atoms_and_degenerate():
    X = DiscreteRandomVariable.from_atoms([(0.1, 0.25), (0.3, 0.75)])
    assert X.mean() == pytest.approx(0.25)
    assert X.support == (0.1, 0.3)
    assert DiscreteRandomVariable.degenerate(2.0).atoms == [(2.0, 1.0)]


def test_expectation_of_function():
    X = DiscreteRandomVariable((1.0, 2.0, 3.0), (0.2, 0.3, 0.5))
    assert expectation(X, np.exp) == pytest.approx(0.2 * math.e + 0.3 * math.e**2 + 0.5 * math.e**3)


@pytest.mark.parametrize(
    "values, probs",
    [
        ((), ()),
        ((1.0, 2.0), (0.5,)),
        ((1.0, 2.0), (0.6, 0.6)),
        ((1.0, 2.0), (1.5, -0.5)),
        ((math.nan,), (1.0,)),
    ],
)
def test_invalid_distributions_rejected(values, probs):
    with pytest.raises(ValidationError):
        DiscreteRandomVariable(values, probs)


def test_probability_sum_tolerance():
    DiscreteRandomVariable((0.0, 1.0), (0.5, 0.5 + 5e-13))
    with pytest.raises(ValidationError):
        DiscreteRandomVariable((0.0, 1.0), (0.5, 0.5 + 1e-9))


@pytest.mark.parametrize("n", [2, 3, 5, 10, 20])
def test_discretize_normal_matches_moments(n):
    X = discretize_normal(0.05, 0.2, n)
    assert len(X.values) == n
    assert X.mean() == pytest.approx(0.05, abs=1e-15)
    assert X.second_moment_about(0.05) == pytest.approx(0.04, rel=1e-12)


def test_discretize_normal_fourth_moment():
    # Gauss-Hermite with n >= 3 reproduces E[Z^4] = 3 exactly
    X = discretize_normal(0.0, 1.0, 5)
    assert expectation(X, lambda x: x**4) == pytest.approx(3.0, rel=1e-12)


def test_discretize_normal_degenerate_cases():
    assert discretize_normal(0.3, 0.0, 7) == DiscreteRandomVariable.degenerate(0.3)
    assert discretize_normal(0.3, 1.0, 1) == DiscreteRandomVariable.degenerate(0.3)
    with pytest.raises(DomainError):
        discretize_normal(0.0, -1.0, 3)


atoms = st.lists(
    st.tuples(st.floats(-10, 10), st.floats(0.01, 1.0)), min_size=1, max_size=8
)


@given(atoms, st.floats(-5, 5))
def test_moment_identities(pairs, r):
    p = np.array([w for _, w in pairs])
    p = p / p.sum()
    X = DiscreteRandomVariable(tuple(x for x, _ in pairs), tuple(p.tolist()))
    m = X.mean()
    lo, hi = X.support
    assert lo - 1e-9 <= m <= hi + 1e-9
    var = expectation(X, lambda x: (x - m) ** 2)
    assert X.second_moment_about(r) == pytest.approx(var + (m - r) ** 2, rel=1e-9, abs=1e-9)
    assert X.shifted(r).mean() == pytest.approx(m + r, abs=1e-9)
    assert X.scaled_about_mean(0.1).mean() == pytest.approx(m, abs=1e-9)
