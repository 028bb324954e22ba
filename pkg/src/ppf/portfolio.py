"""Two-asset allocation with and without background risk.

An agent splits initial wealth ``w0`` between a bond paying ``r`` and a
risky asset with return ``x``; a background risk ``y`` is added to final
wealth. Final wealth is ``w + y + alpha * (x - r)`` with ``w = w0 * (1 + r)``.
Four models differ in how ``x`` and ``y`` are described:

======  =====================  =====================
tag     investment return      background risk
======  =====================  =====================
M1      fuzzy ``A``            none
M2      fuzzy ``A``            fuzzy ``B``
M3      fuzzy ``A``            random ``Y``
M4      random ``X``           fuzzy ``B``
======  =====================  =====================

The objective is the possibilistic (M1, M2) or mixed (M3, M4) expected
utility of final wealth. :func:`solve_exact` maximizes it numerically;
:func:`alpha_approx` gives the closed form obtained from a first-order
expansion of ``u'`` around ``w``.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy import optimize

from .errors import DegenerateInputError, DomainError, NoInteriorOptimumError, SolverError, ValidationError
from .expected_utility import MultiUtility, mixed_eu, possibilistic_eu
from .fuzzy import (
    FuzzyNumber,
    QuadratureConfig,
    WeightingFunction,
    covariance,
    expected_value,
    level_weights,
    linear_combination,
    variance,
)
from .stochastic import DiscreteRandomVariable
from .utility import UtilityFunction, arrow_pratt, more_risk_averse

SOLVER_TOL = 1e-10
DENOMINATOR_FLOOR = 1e-15
COMPARE_SLACK = 1e-12


class ModelTag(str, enum.Enum):
    M1 = "M1_possibilistic"
    M2 = "M2_poss_poss_background"
    M3 = "M3_poss_prob_background"
    M4 = "M4_prob_poss_background"

    @classmethod
    def parse(cls, text: str) -> "ModelTag":
        for tag in cls:
            if text in (tag.name, tag.value):
                return tag
        raise ValidationError(f"unknown model tag {text!r}")

    @property
    def short(self) -> str:
        return self.name


@dataclass(frozen=True)
class MarketSpec:
    w0: float
    r: float
    w: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.w0, self.r, self.w)):
            raise ValidationError("market values must be finite")
        if self.r <= -1:
            raise ValidationError(f"risk-free return must exceed -1, got {self.r}")
        if abs(self.w - self.w0 * (1.0 + self.r)) > 1e-12 * max(1.0, abs(self.w)):
            raise ValidationError(f"w={self.w} does not equal w0*(1+r)={self.w0 * (1 + self.r)}")

    @classmethod
    def from_w0(cls, w0: float, r: float) -> "MarketSpec":
        return cls(float(w0), float(r), float(w0) * (1.0 + float(r)))

    @classmethod
    def from_wealth(cls, w: float, r: float) -> "MarketSpec":
        return cls(float(w) / (1.0 + float(r)), float(r), float(w))


@dataclass(frozen=True)
class ModelSpec:
    tag: ModelTag
    market: MarketSpec
    investment: FuzzyNumber | DiscreteRandomVariable
    u: UtilityFunction
    background: FuzzyNumber | DiscreteRandomVariable | None = None
    f: WeightingFunction = field(default_factory=lambda: WeightingFunction.power(1))
    q: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self):
        tag = ModelTag.parse(self.tag) if isinstance(self.tag, str) and not isinstance(self.tag, ModelTag) else self.tag
        object.__setattr__(self, "tag", tag)
        fuzzy_inv = isinstance(self.investment, FuzzyNumber)
        bg = self.background
        expected = {
            ModelTag.M1: (True, type(None)),
            ModelTag.M2: (True, FuzzyNumber),
            ModelTag.M3: (True, DiscreteRandomVariable),
            ModelTag.M4: (False, FuzzyNumber),
        }[tag]
        if fuzzy_inv != expected[0] or not isinstance(self.investment, (FuzzyNumber, DiscreteRandomVariable)):
            kind = "fuzzy number" if expected[0] else "discrete random variable"
            raise ValidationError(f"{tag.name} needs a {kind} investment return")
        if not isinstance(bg, expected[1]):
            need = {type(None): "no background risk", FuzzyNumber: "a fuzzy background risk",
                    DiscreteRandomVariable: "a random background risk"}[expected[1]]
            raise ValidationError(f"{tag.name} needs {need}")

    @property
    def w(self) -> float:
        return self.market.w

    @property
    def r(self) -> float:
        return self.market.r

    def with_wealth(self, w: float) -> "ModelSpec":
        return dataclasses.replace(self, market=MarketSpec.from_wealth(w, self.r))

    def with_utility(self, u: UtilityFunction) -> "ModelSpec":
        return dataclasses.replace(self, u=u)


class Indicators(NamedTuple):
    mean_a: float | None = None
    var_a: float | None = None
    cov_ab: float | None = None
    mean_b: float | None = None
    mean_y: float | None = None
    mean_x: float | None = None
    second_moment_x: float | None = None

    def as_dict(self) -> dict:
        return {k: v for k, v in self._asdict().items() if v is not None}


@dataclass(frozen=True)
class Solution:
    alpha_exact: float
    alpha_approx: float
    objective_at_exact: float
    derivative_at_exact: float
    indicators: Indicators
    iterations: int
    bracket: tuple[float, float]
    degenerate: bool = False

    @property
    def gap(self) -> float:
        return self.alpha_exact - self.alpha_approx


class Approximation(NamedTuple):
    alpha: float
    indicators: Indicators


# ---------------------------------------------------------------------------
# objective and derivative
# ---------------------------------------------------------------------------


def _kernel(m: ModelSpec, alpha: float, phi) -> float:
    """Expected value of ``phi(wealth, excess_return)`` under model ``m``."""
    w, r = m.w, m.r
    tag = m.tag
    if tag is ModelTag.M1:
        h = MultiUtility(1, lambda x: phi(w + alpha * (x - r), x - r))
        return possibilistic_eu(m.f, h, [m.investment], m.q)
    h = MultiUtility(2, lambda x, y: phi(w + y + alpha * (x - r), x - r))
    if tag is ModelTag.M2:
        return possibilistic_eu(m.f, h, [m.investment, m.background], m.q)
    if tag is ModelTag.M3:
        return mixed_eu(m.f, h, [m.investment], [m.background], m.q)
    # M4: the fuzzy component comes first in the mixed signature
    h4 = MultiUtility(2, lambda y, x: phi(w + y + alpha * (x - r), x - r))
    return mixed_eu(m.f, h4, [m.background], [m.investment], m.q)


def objective(m: ModelSpec, alpha: float) -> float:
    """Expected utility of final wealth when ``alpha`` is held in the risky asset."""
    return _kernel(m, alpha, lambda g, z: m.u.value(g))


def objective_derivative(m: ModelSpec, alpha: float) -> float:
    """d/d alpha of :func:`objective`, differentiated under the integral."""
    return _kernel(m, alpha, lambda g, z: m.u.d1(g) * z)


def objective_second_derivative(m: ModelSpec, alpha: float) -> float:
    return _kernel(m, alpha, lambda g, z: m.u.d2(g) * z * z)


def reachable_offsets(m: ModelSpec) -> tuple[np.ndarray, np.ndarray]:
    """Background values ``y`` and excess returns ``z`` at every evaluation
    point and at the support and core endpoints, so that reachable wealths
    are ``w + y + alpha * z``."""
    nodes, _ = level_weights(m.f, m.q)
    # quadrature nodes never hit g=0, where the support reaches furthest
    gamma = np.concatenate([[0.0], nodes, [1.0]])
    r = m.r
    if m.tag is ModelTag.M4:
        y = np.concatenate([m.background.lower(gamma), m.background.upper(gamma)])
        x = np.asarray(m.investment.values)
        return np.repeat(y, x.size), np.tile(x - r, y.size)
    A = m.investment
    z = np.concatenate([A.lower(gamma), A.upper(gamma)]) - r
    if m.tag is ModelTag.M1:
        return np.zeros_like(z), z
    if m.tag is ModelTag.M2:
        B = m.background
        return np.concatenate([B.lower(gamma), B.upper(gamma)]), z
    yv = np.asarray(m.background.values)
    return np.tile(yv, z.size), np.repeat(z, yv.size)


def feasible_alpha_range(m: ModelSpec) -> tuple[float, float]:
    """Open interval of ``alpha`` keeping every reachable wealth inside the utility domain."""
    lo, hi = m.u.domain
    y, z = reachable_offsets(m)
    base = m.w + y
    m.u.check_domain(base)
    a_lo, a_hi = -math.inf, math.inf
    pos, neg = z > 0, z < 0
    with np.errstate(divide="ignore", invalid="ignore"):
        if np.any(pos):
            a_lo = max(a_lo, float(np.max((lo - base[pos]) / z[pos])))
            a_hi = min(a_hi, float(np.min((hi - base[pos]) / z[pos])))
        if np.any(neg):
            a_lo = max(a_lo, float(np.max((hi - base[neg]) / z[neg])))
            a_hi = min(a_hi, float(np.min((lo - base[neg]) / z[neg])))
    return a_lo, a_hi


# ---------------------------------------------------------------------------
# indicators and closed forms
# ---------------------------------------------------------------------------


def indicators(m: ModelSpec) -> Indicators:
    f, q, tag = m.f, m.q, m.tag
    if tag is ModelTag.M4:
        X, B = m.investment, m.background
        return Indicators(
            mean_b=expected_value(f, B, q),
            mean_x=X.mean(),
            second_moment_x=X.second_moment_about(m.r),
        )
    A = m.investment
    ind = dict(mean_a=expected_value(f, A, q), var_a=variance(f, A, q))
    if tag is ModelTag.M2:
        ind.update(cov_ab=covariance(f, A, m.background, q), mean_b=expected_value(f, m.background, q))
    elif tag is ModelTag.M3:
        ind.update(mean_y=m.background.mean())
    return Indicators(**ind)


def _risk_tolerance(m: ModelSpec) -> float:
    """``-u'(w) / u''(w)``, the reciprocal Arrow-Pratt index at ``w``."""
    return 1.0 / arrow_pratt(m.u, m.w)


def _terms(m: ModelSpec, ind: Indicators) -> tuple[float, float, float]:
    """(excess mean, denominator, background numerator) of the closed forms."""
    r = m.r
    if m.tag is ModelTag.M4:
        excess = ind.mean_x - r
        denom = ind.second_moment_x
        numer = ind.mean_b * excess
    else:
        excess = ind.mean_a - r
        denom = ind.var_a + excess * excess
        if m.tag is ModelTag.M2:
            numer = ind.cov_ab + ind.mean_b * excess
        elif m.tag is ModelTag.M3:
            numer = ind.mean_y * excess
        else:
            numer = 0.0
    if not denom > DENOMINATOR_FLOOR:
        raise DegenerateInputError(
            f"approximation denominator {denom!r} vanishes: the risky asset is riskless at the bond rate"
        )
    return excess, denom, numer


def alpha_approx(m: ModelSpec) -> Approximation:
    """Closed-form allocation ``(1 / r_u(w)) * excess / denom - numer / denom``.

    For M1-M3 ``excess = E(f,A) - r`` and ``denom = Var(f,A) + excess**2``;
    for M4 ``excess = M(X) - r`` and ``denom = M[(X - r)**2]``. The
    background numerator is ``Cov(f,A,B) + E(f,B) * excess`` (M2),
    ``M(Y) * excess`` (M3), ``E(f,B) * excess`` (M4) and zero for M1.
    """
    ind = indicators(m)
    excess, denom, numer = _terms(m, ind)
    return Approximation(_risk_tolerance(m) * excess / denom - numer / denom, ind)


def background_adjustment(m: ModelSpec) -> float:
    """Shift of the approximate allocation caused by the background risk."""
    if m.tag is ModelTag.M1:
        raise ValidationError("M1 has no background risk to adjust for")
    _, denom, numer = _terms(m, indicators(m))
    return -numer / denom


def strip_background(m: ModelSpec) -> ModelSpec:
    """The same investor without background risk.

    M2 and M3 reduce to M1; M4 keeps its random return with ``B = point(0)``.
    """
    if m.tag in (ModelTag.M2, ModelTag.M3):
        return dataclasses.replace(m, tag=ModelTag.M1, background=None)
    if m.tag is ModelTag.M4:
        return dataclasses.replace(m, background=FuzzyNumber.point(0.0))
    return m


class OrderingCondition(NamedTuple):
    predicted: bool
    value: float


def ordering_condition(m: ModelSpec) -> OrderingCondition:
    """Predict whether adding the background risk lowers the allocation.

    ``value`` is ``Cov(f,A,B) + E(f,B)(E(f,A) - r)`` for M2 and
    ``M(Y)(E(f,A) - r)`` for M3; the allocation with background is at most
    the one without iff ``value >= 0``.
    """
    if m.tag not in (ModelTag.M2, ModelTag.M3):
        raise ValidationError(f"ordering condition is defined for M2 and M3, not {m.tag.name}")
    ind = indicators(m)
    excess = ind.mean_a - m.r
    if m.tag is ModelTag.M2:
        value = ind.cov_ab + ind.mean_b * excess
    else:
        value = ind.mean_y * excess
    return OrderingCondition(value >= 0, value)


def rate_threshold(m: ModelSpec) -> float | None:
    """For M2 with ``E(f,B) > 0``: the largest bond rate for which the
    background risk lowers the allocation. ``None`` otherwise."""
    if m.tag is not ModelTag.M2:
        raise ValidationError("rate threshold is defined for M2 only")
    ind = indicators(m)
    if not ind.mean_b > 0:
        return None
    return (ind.cov_ab + ind.mean_a * ind.mean_b) / ind.mean_b


# ---------------------------------------------------------------------------
# exact solution
# ---------------------------------------------------------------------------


def _bracket(d, d0: float, a_lo: float, a_hi: float, max_steps: int = 400):
    """Walk outward from 0 with doubling steps until ``d`` changes sign.

    Steps that would leave the open interval ``(a_lo, a_hi)`` are replaced by
    moving halfway to the boundary.
    """
    s = 1.0 if d0 > 0 else -1.0
    boundary = a_hi if s > 0 else a_lo
    prev, step = 0.0, 1.0
    for k in range(1, max_steps + 1):
        cand = prev + s * step
        if (s > 0 and cand >= boundary) or (s < 0 and cand <= boundary):
            cand = 0.5 * (prev + boundary)
            if cand == prev or cand == boundary:
                break
        if abs(cand) > 1e15:
            break
        dc = d(cand)
        if dc * s <= 0:
            return (prev, cand) if s > 0 else (cand, prev), k
        prev, step = cand, 2.0 * step
    raise NoInteriorOptimumError(
        f"objective derivative keeps sign {'+' if s > 0 else '-'} up to alpha={prev!r} "
        f"(feasible boundary {boundary!r}); no interior optimum",
        boundary=boundary,
    )


def solve_exact(m: ModelSpec, tol: float = SOLVER_TOL) -> Solution:
    """Maximize the objective over ``alpha`` (unconstrained in sign).

    The objective is concave, so the optimum is the root of its derivative.
    The root is bracketed by outward doubling from zero and then bisected.
    """
    y, z = reachable_offsets(m)
    if np.all(z == 0):
        # riskless asset paying the bond rate: any alpha is optimal
        m.u.check_domain(m.w + y)
        return Solution(0.0, 0.0, objective(m, 0.0), 0.0, indicators(m), 0, (0.0, 0.0), degenerate=True)

    if np.all(z >= 0) or np.all(z <= 0):
        # u' > 0, so the derivative has the sign of z everywhere
        side = "above" if np.all(z >= 0) else "below"
        raise NoInteriorOptimumError(
            f"every reachable return lies {side} the bond rate {m.r!r}; the objective is "
            f"monotone in alpha and has no interior optimum",
            boundary=feasible_alpha_range(m)[1 if side == "above" else 0],
        )
    approx = alpha_approx(m)
    a_lo, a_hi = feasible_alpha_range(m)
    if not a_lo < 0.0 < a_hi:
        raise DomainError(f"alpha=0 is not strictly feasible: feasible range ({a_lo!r}, {a_hi!r})")

    d = lambda a: objective_derivative(m, a)
    d0 = d(0.0)
    if d0 == 0.0:
        root, iterations, bracket = 0.0, 0, (0.0, 0.0)
    else:
        bracket, iterations = _bracket(d, d0, a_lo, a_hi)
        lo, hi = bracket
        # relative precision near machine epsilon: with a steep derivative
        # a few ulps of alpha already move it by more than the tolerance
        root, res = optimize.bisect(d, lo, hi, xtol=1e-20, rtol=4 * np.finfo(float).eps,
                                    maxiter=500, full_output=True)
        iterations += res.iterations
    droot = d(root)
    if abs(droot) > tol:
        raise SolverError(f"derivative {droot!r} at alpha={root!r} exceeds tolerance {tol!r}")
    return Solution(
        alpha_exact=float(root),
        alpha_approx=approx.alpha,
        objective_at_exact=objective(m, root),
        derivative_at_exact=float(droot),
        indicators=approx.indicators,
        iterations=iterations,
        bracket=tuple(float(v) for v in bracket),
    )


# ---------------------------------------------------------------------------
# comparative statics
# ---------------------------------------------------------------------------


class ComparativeReport(NamedTuple):
    alpha_approx_1: float
    alpha_approx_2: float
    alpha_exact_1: float
    alpha_exact_2: float
    approx_ordered: bool
    exact_ordered: bool


def risk_aversion_comparative(
    m1: ModelSpec, m2: ModelSpec, grid: Sequence[float] | None = None
) -> ComparativeReport:
    """Allocations of a more risk-averse investor ``m1`` and a less
    risk-averse one ``m2``, otherwise identical."""
    if dataclasses.replace(m1, u=m2.u) != m2:
        raise ValidationError("models must differ only in the utility function")
    grid = [m1.w] if grid is None else grid
    if not more_risk_averse(m1.u, m2.u, grid):
        raise ValidationError(f"{m1.u!r} is not more risk averse than {m2.u!r} on the grid")
    s1, s2 = solve_exact(m1), solve_exact(m2)
    return ComparativeReport(
        s1.alpha_approx,
        s2.alpha_approx,
        s1.alpha_exact,
        s2.alpha_exact,
        s1.alpha_approx <= s2.alpha_approx + COMPARE_SLACK,
        s1.alpha_exact <= s2.alpha_exact + COMPARE_SLACK,
    )


class SweepRow(NamedTuple):
    w: float
    alpha_exact: float
    alpha_approx: float


class SweepReport(NamedTuple):
    rows: list
    violations: list  # wealths where a DARA investor's approximate allocation fails to rise


def wealth_sweep(m: ModelSpec, wealth_grid: Sequence[float]) -> SweepReport:
    """Re-solve the model at each future wealth ``w`` (``r`` held fixed)."""
    rows = []
    for w in wealth_grid:
        mw = m.with_wealth(w)
        try:
            s = solve_exact(mw)
        except Exception as exc:
            raise type(exc)(f"at w={w!r}: {exc}") from exc
        rows.append(SweepRow(float(w), s.alpha_exact, s.alpha_approx))
    violations = []
    if m.u.is_dara:
        ordered = sorted(rows)
        for prev, cur in zip(ordered, ordered[1:]):
            if not cur.alpha_approx > prev.alpha_approx:
                violations.append(cur.w)
    return SweepReport(rows, violations)


def scale_risks(m: ModelSpec, eps: float, premium_power: float = 2.0) -> ModelSpec:
    """Shrink every risk toward its mean.

    Deviations of each fuzzy or random risk about its mean are multiplied by
    ``eps``; the investment's excess mean return is multiplied by
    ``eps**premium_power``. The default exponent 2 keeps the ratio of excess
    return to variance fixed, which is the small-risk regime where the
    closed-form allocation becomes exact. ``premium_power=0`` keeps all means.
    """
    f, q, r = m.f, m.q, m.r

    def shrink(risk, excess_scale=None):
        if isinstance(risk, FuzzyNumber):
            mean = expected_value(f, risk, q)
            target = mean if excess_scale is None else r + excess_scale * (mean - r)
            return linear_combination([(eps, risk), (1.0, FuzzyNumber.point(target - eps * mean))])
        mean = risk.mean()
        target = mean if excess_scale is None else r + excess_scale * (mean - r)
        return DiscreteRandomVariable(
            tuple(target + eps * (v - mean) for v in risk.values), risk.probabilities
        )

    investment = shrink(m.investment, eps**premium_power)
    background = None if m.background is None else shrink(m.background)
    return dataclasses.replace(m, investment=investment, background=background)
