"""Possibilistic indicators of fuzzy numbers and two-asset portfolio
choice under fuzzy and random investment and background risk."""

from .errors import (
    DegenerateInputError,
    DomainError,
    NoInteriorOptimumError,
    PPFError,
    SolverError,
    ValidationError,
)
from .expected_utility import MultiUtility, mixed_eu, possibilistic_eu, probabilistic_eu
from .fuzzy import (
    FuzzyNumber,
    QuadratureConfig,
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
from .portfolio import (
    MarketSpec,
    ModelSpec,
    ModelTag,
    Solution,
    alpha_approx,
    background_adjustment,
    indicators,
    objective,
    objective_derivative,
    ordering_condition,
    risk_aversion_comparative,
    scale_risks,
    solve_exact,
    strip_background,
    wealth_sweep,
)
from .stochastic import DiscreteRandomVariable, discretize_normal, expectation
from .utility import UtilityFunction, arrow_pratt, check_derivatives, more_risk_averse

__version__ = "0.1.0"
