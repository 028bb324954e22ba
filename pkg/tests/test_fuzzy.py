import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from ppf import (
    DomainError,
    QuadratureConfig,
    ValidationError,
    WeightingFunction,
    covariance,
    expected_value,
    level_set,
    linear_combination,
    point,
    sampled,
    trapezoidal,
    triangular,
    validate_weighting,
    variance,
)

F2G = WeightingFunction.power(1)


def quad_oracle(fn):
    """Adaptive quadrature of fn over [0, 1]; independent of the Gauss rule."""
    # asking for more than double precision can deliver; the roundoff warning is expected
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(fn, 0.0, 1.0, epsabs=1e-14, epsrel=1e-14, limit=200)[0]


def oracle_mean(f, A):
    return quad_oracle(lambda g: 0.5 * (A.lower(g) + A.upper(g)) * f(g))


def oracle_var(f, A):
    m = oracle_mean(f, A)
    return quad_oracle(lambda g: 0.5 * ((A.lower(g) - m) ** 2 + (A.upper(g) - m) ** 2) * f(g))


finite = st.floats(-5, 5, allow_nan=False)
width = st.floats(0, 3, allow_nan=False)


@st.composite
def fuzzy_numbers(draw):
    c = draw(finite)
    lw, rw = draw(width), draw(width)
    if draw(st.booleans()):
        return triangular(c, lw, rw)
    return trapezoidal(c, c + draw(width), lw, rw)


weightings = st.sampled_from(
    [WeightingFunction.power(1), WeightingFunction.uniform(), WeightingFunction.power(2), WeightingFunction.power(0.5)]
)


# --- level sets -----------------------------------------------------------


def test_level_set_triangular_support():
    assert level_set(triangular(1, 0.6, 0.6), 0.0) == pytest.approx((0.4, 1.6))


def test_level_set_point():
    for g in (0.0, 0.3, 1.0):
        assert level_set(point(3), g) == (3.0, 3.0)


def test_level_set_midpoint():
    assert level_set(triangular(0.08, 0.03, 0.03), 0.5) == pytest.approx((0.065, 0.095))


@pytest.mark.parametrize("g", [-0.1, 1.5])
def test_level_set_rejects_gamma_outside_unit_interval(g):
    with pytest.raises(DomainError):
        level_set(triangular(0, 1, 1), g)


def test_sampled_interpolates_linearly():
    A = sampled([(0, 0.0, 4.0), (0.5, 1.0, 3.0), (1, 2.0, 2.0)])
    assert level_set(A, 0.25) == pytest.approx((0.5, 3.5))


@pytest.mark.parametrize(
    "rows",
    [
        [(0.1, 0, 1), (1, 0.5, 0.5)],  # gamma=0 missing
        [(0, 0, 1), (0.5, 0.6, 0.9), (1, 0.5, 0.5)],  # lower decreases
        [(0, 0, 1), (1, 2, 1.5)],  # crossed at the core
    ],
)
def test_sampled_rejects_invalid_grids(rows):
    with pytest.raises(ValidationError):
        sampled(rows)


def test_trapezoid_with_equal_core_is_triangular():
    assert trapezoidal(1, 1, 0.2, 0.3) == triangular(1, 0.2, 0.3)


def test_negative_widths_rejected():
    with pytest.raises(ValidationError):
        triangular(0, -1, 1)


@settings(max_examples=100)
@given(fuzzy_numbers())
def test_level_sets_are_nested(A):
    grid = np.linspace(0, 1, 21)
    lo, hi = A.lower(grid), A.upper(grid)
    assert np.all(np.diff(lo) >= -1e-12)
    assert np.all(np.diff(hi) <= 1e-12)
    assert np.all(lo <= hi + 1e-12)


# --- arithmetic -----------------------------------------------------------


def test_sum_of_triangulars():
    C = linear_combination([(1, triangular(1, 0.2, 0.2)), (1, triangular(2, 0.3, 0.3))])
    assert C.kind == "triangular"
    assert C.params == pytest.approx((3, 0.5, 0.5))


def test_negation_swaps_widths():
    C = linear_combination([(-1, triangular(1, 0.2, 0.4))])
    assert C.kind == "triangular"
    assert C.params == pytest.approx((-1, 0.4, 0.2))


def test_zero_scaling_gives_point():
    assert linear_combination([(0, trapezoidal(1, 2, 0.5, 0.5))]) == point(0)


def test_empty_combination_rejected():
    with pytest.raises(ValidationError):
        linear_combination([])


def test_operators_match_linear_combination():
    A, B = triangular(1, 0.2, 0.4), trapezoidal(0, 1, 0.3, 0.1)
    assert 2 * A - B == linear_combination([(2, A), (-1, B)])
    assert (A + 0.5).params == pytest.approx((1.5, 0.2, 0.4))


def test_combination_with_sampled_matches_endpoint_rules():
    S = sampled([(0, 0.0, 4.0), (0.5, 1.0, 3.0), (1, 2.0, 2.0)])
    T = triangular(1, 0.5, 0.2)
    C = linear_combination([(-2, S), (1, T)])
    grid = np.linspace(0, 1, 11)
    assert np.allclose(C.lower(grid), -2 * S.upper(grid) + T.lower(grid))
    assert np.allclose(C.upper(grid), -2 * S.lower(grid) + T.upper(grid))


# --- weighting ------------------------------------------------------------


def test_power_one_is_valid():
    rep = validate_weighting(WeightingFunction.power(1))
    assert rep.valid and rep.integral == pytest.approx(1.0)


def test_uniform_is_valid():
    assert validate_weighting(WeightingFunction.uniform()).valid


def test_three_gamma_fails_normality():
    rep = validate_weighting(WeightingFunction.custom(lambda g: 3 * g))
    assert not rep.valid
    assert rep.nonnegative and rep.monotone
    assert rep.integral == pytest.approx(1.5)


def test_decreasing_weighting_flagged():
    rep = validate_weighting(WeightingFunction.custom(lambda g: 2 - 2 * g))
    assert not rep.valid and not rep.monotone


def test_invalid_weighting_rejected_by_indicators():
    with pytest.raises(ValidationError, match="normality"):
        expected_value(WeightingFunction.polynomial([0, 3]), triangular(0, 1, 1))


# --- indicators -----------------------------------------------------------


def test_mean_symmetric_triangle():
    assert expected_value(F2G, triangular(1, 0.6, 0.6)) == pytest.approx(1.0, abs=1e-12)


def test_mean_skewed_triangle_closed_form():
    # center + (right - left)/6 = 1, checked against adaptive quadrature too
    A = triangular(0, 0, 6)
    assert oracle_mean(F2G, A) == pytest.approx(1.0, abs=1e-12)
    assert expected_value(F2G, A, QuadratureConfig(256)) == pytest.approx(1.0, abs=1e-12)
    assert expected_value(F2G, A) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("f", [WeightingFunction.power(1), WeightingFunction.uniform(), WeightingFunction.power(3)])
def test_point_indicators(f):
    assert expected_value(f, point(2.5)) == 2.5
    assert variance(f, point(2.5)) == 0.0


@pytest.mark.parametrize("w, expected", [(0.6, 0.06), (0.03, 0.00015), (1.0, 1 / 6)])
def test_variance_symmetric_triangle(w, expected):
    A = triangular(0.3, w, w)
    assert oracle_var(F2G, A) == pytest.approx(expected, rel=1e-12)
    assert variance(F2G, A) == pytest.approx(expected, rel=1e-12)


def test_covariance_closed_form():
    A, B = triangular(0, 1, 1), triangular(0, 2, 2)
    oracle = quad_oracle(lambda g: 0.5 * (A.lower(g) * B.lower(g) + A.upper(g) * B.upper(g)) * F2G(g))
    assert oracle == pytest.approx(1 / 3, abs=1e-12)
    assert covariance(F2G, A, B) == pytest.approx(1 / 3, abs=1e-12)


def test_covariance_with_self_is_variance():
    A = trapezoidal(0.1, 0.4, 0.3, 0.9)
    assert covariance(F2G, A, A) == pytest.approx(variance(F2G, A), abs=1e-14)


def test_covariance_with_point_vanishes():
    assert covariance(F2G, triangular(1, 0.4, 2), point(7)) == pytest.approx(0.0, abs=1e-14)


def test_simpson_rule_agrees_on_polynomials():
    A = trapezoidal(-1, 0.5, 0.7, 0.2)
    q = QuadratureConfig(65, rule="composite_simpson")
    assert expected_value(F2G, A, q) == pytest.approx(expected_value(F2G, A), abs=1e-12)
    assert variance(F2G, A, q) == pytest.approx(variance(F2G, A), abs=1e-12)


def test_quadrature_config_validation():
    with pytest.raises(ValidationError):
        QuadratureConfig(1)
    with pytest.raises(ValidationError):
        QuadratureConfig(8, rule="trapezoid")


def test_node_count_env_override(monkeypatch):
    monkeypatch.setenv("PPF_QUAD_NODES", "16")
    assert QuadratureConfig().node_count == 16
    monkeypatch.delenv("PPF_QUAD_NODES")
    assert QuadratureConfig().node_count == 64


@settings(max_examples=100)
@given(fuzzy_numbers(), fuzzy_numbers(), weightings)
def test_shortcut_identities(A, B, f):
    ea, eb = expected_value(f, A), expected_value(f, B)
    raw_ab = quad_oracle(lambda g: 0.5 * (A.lower(g) * B.lower(g) + A.upper(g) * B.upper(g)) * f(g))
    raw_aa = quad_oracle(lambda g: 0.5 * (A.lower(g) ** 2 + A.upper(g) ** 2) * f(g))
    assert covariance(f, A, B) == pytest.approx(raw_ab - ea * eb, abs=1e-9)
    assert variance(f, A) == pytest.approx(raw_aa - ea * ea, abs=1e-9)


@settings(max_examples=100)
@given(st.lists(st.tuples(st.floats(-3, 3), fuzzy_numbers()), min_size=1, max_size=4), weightings)
def test_mean_is_linear(terms, f):
    combo = linear_combination(terms)
    expected = sum(lam * expected_value(f, A) for lam, A in terms)
    assert expected_value(f, combo) == pytest.approx(expected, abs=1e-10)


@settings(max_examples=100)
@given(fuzzy_numbers(), weightings)
def test_mean_lies_in_support_and_variance_nonnegative(A, f):
    lo, hi = A.support
    m = expected_value(f, A)
    assert lo - 1e-12 <= m <= hi + 1e-12
    assert variance(f, A) >= 0


@settings(max_examples=100)
@given(fuzzy_numbers(), fuzzy_numbers(), weightings)
def test_covariance_cauchy_schwarz(A, B, f):
    assert abs(covariance(f, A, B)) <= np.sqrt(variance(f, A) * variance(f, B)) + 1e-9
    assert covariance(f, A, B) == pytest.approx(covariance(f, B, A), abs=1e-14)
