"""Fuzzy numbers as families of nested level intervals, and their
f-weighted possibilistic indicators (mean, variance, covariance).

A fuzzy number ``A`` is stored through its level sets
``[A]^g = [a1(g), a2(g)]`` for ``g`` in ``[0, 1]``. Every indicator is a
weighted integral over ``g``::

    E(f, A)      = 1/2 int (a1 + a2) f
    Var(f, A)    = 1/2 int [(a1 - E)^2 + (a2 - E)^2] f
    Cov(f, A, B) = 1/2 int [(a1 - EA)(b1 - EB) + (a2 - EA)(b2 - EB)] f

evaluated with the rule held by a :class:`QuadratureConfig`.
"""

from __future__ import annotations

import functools
import math
import os
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import integrate
from scipy.special import roots_jacobi

from .errors import DomainError, ValidationError

DEFAULT_NODES = 64
NODES_ENV_VAR = "PPF_QUAD_NODES"

_LINEAR_KINDS = ("triangular", "trapezoidal", "point")


def _default_node_count() -> int:
    raw = os.environ.get(NODES_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_NODES
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"{NODES_ENV_VAR}={raw!r} is not an integer") from None


@functools.lru_cache(maxsize=64)
def _rule_nodes(rule: str, node_count: int) -> tuple[np.ndarray, np.ndarray]:
    if rule == "gauss_legendre":
        x, w = np.polynomial.legendre.leggauss(node_count)
        gamma, weights = 0.5 * (x + 1.0), 0.5 * w
    elif rule == "composite_simpson":
        # Simpson needs an odd point count.
        n = node_count if node_count % 2 == 1 else node_count + 1
        gamma = np.linspace(0.0, 1.0, n)
        weights = np.ones(n)
        weights[1:-1:2] = 4.0
        weights[2:-1:2] = 2.0
        weights *= (1.0 / (n - 1)) / 3.0
    else:
        raise ValidationError(f"unknown quadrature rule {rule!r}")
    gamma.flags.writeable = False
    weights.flags.writeable = False
    return gamma, weights


@dataclass(frozen=True)
class QuadratureConfig:
    """Rule used for every integral over the level parameter ``g`` in [0, 1].

    The default node count can be overridden through the ``PPF_QUAD_NODES``
    environment variable.
    """

    node_count: int = field(default_factory=_default_node_count)
    rule: str = "gauss_legendre"
    tolerance: float = 1e-9

    def __post_init__(self):
        if int(self.node_count) != self.node_count or self.node_count < 2:
            raise ValidationError(f"node_count must be an integer >= 2, got {self.node_count}")
        if self.rule not in ("gauss_legendre", "composite_simpson"):
            raise ValidationError(f"unknown quadrature rule {self.rule!r}")
        if not self.tolerance > 0:
            raise ValidationError("tolerance must be positive")

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(gamma, weights)`` on [0, 1]; read-only arrays."""
        return _rule_nodes(self.rule, int(self.node_count))


# ---------------------------------------------------------------------------
# Weighting functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightingFunction:
    """Non-negative, weakly increasing density on [0, 1].

    Use :meth:`power`, :meth:`uniform` or :meth:`custom` to build one.
    ``power(n)`` is ``f(g) = (n + 1) g**n``; ``power(1)`` gives ``f(g) = 2g``.
    """

    kind: str
    exponent: float | None = None
    evaluator: Callable | None = None
    name: str | None = None
    coefficients: tuple[float, ...] | None = None

    @classmethod
    def power(cls, n: float = 1.0) -> "WeightingFunction":
        if not (n >= 0 and math.isfinite(n)):
            raise ValidationError(f"power weighting needs a finite exponent >= 0, got {n}")
        return cls("power", exponent=float(n))

    @classmethod
    def uniform(cls) -> "WeightingFunction":
        return cls("uniform")

    @classmethod
    def custom(cls, fn: Callable, name: str | None = None) -> "WeightingFunction":
        return cls("custom", evaluator=fn, name=name)

    @classmethod
    def polynomial(cls, coefficients) -> "WeightingFunction":
        """Custom weighting ``sum(c_k * g**k)`` with ascending coefficients."""
        coefficients = tuple(float(c) for c in coefficients)
        if not coefficients:
            raise ValidationError("polynomial weighting needs at least one coefficient")
        return cls("polynomial", coefficients=coefficients)

    def __call__(self, gamma):
        g = np.asarray(gamma, dtype=float)
        if self.kind == "power":
            n = self.exponent
            if n == 0:
                return np.ones_like(g)
            return (n + 1.0) * g**n
        if self.kind == "uniform":
            return np.ones_like(g)
        if self.kind == "custom":
            return np.asarray(self.evaluator(g), dtype=float) * np.ones_like(g)
        if self.kind == "polynomial":
            return np.polynomial.polynomial.polyval(g, self.coefficients)
        raise ValidationError(f"unknown weighting kind {self.kind!r}")

    def __repr__(self):
        if self.kind == "power":
            return f"WeightingFunction.power({self.exponent:g})"
        if self.kind == "uniform":
            return "WeightingFunction.uniform()"
        if self.kind == "polynomial":
            return f"WeightingFunction.polynomial({list(self.coefficients)})"
        return f"WeightingFunction.custom({self.name or self.evaluator!r})"


class WeightingReport(NamedTuple):
    valid: bool
    nonnegative: bool
    monotone: bool
    integral: float
    messages: tuple[str, ...]


def validate_weighting(
    f: WeightingFunction, grid_size: int = 101, tolerance: float = 1e-9
) -> WeightingReport:
    """Check non-negativity and weak monotonicity on a uniform grid, and
    that ``f`` integrates to one within ``tolerance``."""
    if grid_size < 2:
        raise ValidationError("grid_size must be >= 2")
    grid = np.linspace(0.0, 1.0, grid_size)
    values = f(grid)
    messages = []
    nonnegative = bool(np.all(values >= 0))
    if not nonnegative:
        bad = grid[np.argmax(values < 0)]
        messages.append(f"negative at gamma={bad:g}")
    # tiny slack for rounding in user evaluators
    steps = np.diff(values)
    monotone = bool(np.all(steps >= -1e-12 * np.maximum(1.0, np.abs(values[1:]))))
    if not monotone:
        bad = grid[1:][np.argmax(steps < -1e-12 * np.maximum(1.0, np.abs(values[1:])))]
        messages.append(f"decreasing near gamma={bad:g}")
    total, _ = integrate.quad(lambda g: float(f(g)), 0.0, 1.0, epsabs=1e-13, epsrel=1e-13, limit=200)
    normal = abs(total - 1.0) <= tolerance
    if not normal:
        messages.append(f"normality fails: integral is {total:.12g}, not 1")
    return WeightingReport(nonnegative and monotone and normal, nonnegative, monotone, total, tuple(messages))


@functools.lru_cache(maxsize=256)
def _check_weighting(f: WeightingFunction) -> WeightingReport:
    return validate_weighting(f)


def require_valid_weighting(f: WeightingFunction) -> None:
    report = _check_weighting(f)
    if not report.valid:
        raise ValidationError(f"invalid weighting function {f!r}: " + "; ".join(report.messages))


# ---------------------------------------------------------------------------
# Fuzzy numbers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FuzzyNumber:
    """A fuzzy number described by its level sets.

    ``kind`` is one of ``triangular``, ``trapezoidal``, ``point`` or
    ``sampled``; ``params`` holds the kind's parameters in the order of the
    matching constructor. Sampled numbers keep ``(gamma, a1, a2)`` rows and
    interpolate linearly between them.
    """

    kind: str
    params: tuple

    def __post_init__(self):
        if self.kind == "triangular":
            c, lw, rw = self.params
            _check_finite(c, lw, rw)
            if lw < 0 or rw < 0:
                raise ValidationError(f"widths must be non-negative, got {lw}, {rw}")
        elif self.kind == "trapezoidal":
            cl, cr, lw, rw = self.params
            _check_finite(cl, cr, lw, rw)
            if cl > cr:
                raise ValidationError(f"core_left {cl} exceeds core_right {cr}")
            if lw < 0 or rw < 0:
                raise ValidationError(f"widths must be non-negative, got {lw}, {rw}")
        elif self.kind == "point":
            _check_finite(*self.params)
        elif self.kind == "sampled":
            _check_sampled(self.params)
        else:
            raise ValidationError(f"unknown fuzzy number kind {self.kind!r}")

    # constructors ---------------------------------------------------------

    @classmethod
    def triangular(cls, center: float, left_width: float, right_width: float) -> "FuzzyNumber":
        return cls("triangular", (float(center), float(left_width), float(right_width)))

    @classmethod
    def trapezoidal(
        cls, core_left: float, core_right: float, left_width: float, right_width: float
    ) -> "FuzzyNumber":
        if core_left == core_right:
            return cls.triangular(core_left, left_width, right_width)
        return cls("trapezoidal", (float(core_left), float(core_right), float(left_width), float(right_width)))

    @classmethod
    def point(cls, value: float) -> "FuzzyNumber":
        return cls("point", (float(value),))

    @classmethod
    def sampled(cls, rows: Sequence[Sequence[float]]) -> "FuzzyNumber":
        """Build from ``(gamma, a1, a2)`` rows; gamma must cover 0 and 1."""
        rows = tuple(sorted((float(g), float(a), float(b)) for g, a, b in rows))
        return cls("sampled", rows)

    # level sets -----------------------------------------------------------

    def _lr(self) -> tuple[float, float, float, float]:
        if self.kind == "triangular":
            c, lw, rw = self.params
            return c, c, lw, rw
        if self.kind == "trapezoidal":
            return self.params
        if self.kind == "point":
            (c,) = self.params
            return c, c, 0.0, 0.0
        raise TypeError("sampled fuzzy numbers have no linear representation")

    def lower(self, gamma):
        """Lower endpoint a1(gamma); vectorized."""
        g = np.asarray(gamma, dtype=float)
        if self.kind == "sampled":
            rows = np.asarray(self.params)
            return np.interp(g, rows[:, 0], rows[:, 1])
        cl, _, lw, _ = self._lr()
        return cl - lw * (1.0 - g)

    def upper(self, gamma):
        """Upper endpoint a2(gamma); vectorized."""
        g = np.asarray(gamma, dtype=float)
        if self.kind == "sampled":
            rows = np.asarray(self.params)
            return np.interp(g, rows[:, 0], rows[:, 2])
        _, cr, _, rw = self._lr()
        return cr + rw * (1.0 - g)

    @property
    def support(self) -> tuple[float, float]:
        return float(self.lower(0.0)), float(self.upper(0.0))

    @property
    def is_point(self) -> bool:
        lo, hi = self.support
        return lo == hi

    def breakpoints(self) -> tuple[float, ...]:
        """Gamma values where the endpoint functions may change slope."""
        if self.kind == "sampled":
            return tuple(row[0] for row in self.params)
        return (0.0, 1.0)

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, FuzzyNumber):
            return linear_combination([(1.0, self), (1.0, other)])
        if np.isscalar(other):
            return linear_combination([(1.0, self), (1.0, FuzzyNumber.point(other))])
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return linear_combination([(-1.0, self)])

    def __sub__(self, other):
        if isinstance(other, FuzzyNumber):
            return linear_combination([(1.0, self), (-1.0, other)])
        if np.isscalar(other):
            return linear_combination([(1.0, self), (1.0, FuzzyNumber.point(-other))])
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        if np.isscalar(scalar):
            return linear_combination([(float(scalar), self)])
        return NotImplemented

    __rmul__ = __mul__


triangular = FuzzyNumber.triangular
trapezoidal = FuzzyNumber.trapezoidal
point = FuzzyNumber.point
sampled = FuzzyNumber.sampled


def _check_finite(*values):
    if not all(math.isfinite(v) for v in values):
        raise ValidationError(f"fuzzy number parameters must be finite, got {values}")


def _check_sampled(rows):
    if len(rows) < 2:
        raise ValidationError("a sampled fuzzy number needs at least two rows")
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValidationError("sampled rows must be (gamma, a1, a2) triples")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("sampled rows must be finite")
    g, a1, a2 = arr.T
    if g[0] != 0.0 or g[-1] != 1.0:
        raise ValidationError("sampled grid must include gamma=0 and gamma=1")
    if np.any(np.diff(g) <= 0):
        raise ValidationError("sampled gamma values must be distinct")
    if np.any(np.diff(a1) < 0):
        raise ValidationError("lower endpoints must be non-decreasing in gamma")
    if np.any(np.diff(a2) > 0):
        raise ValidationError("upper endpoints must be non-increasing in gamma")
    if a1[-1] > a2[-1]:
        raise ValidationError("lower endpoint exceeds upper endpoint at gamma=1")


def _from_lr(cl, cr, lw, rw) -> FuzzyNumber:
    if cl == cr:
        if lw == 0 and rw == 0:
            return FuzzyNumber.point(cl)
        return FuzzyNumber.triangular(cl, lw, rw)
    return FuzzyNumber.trapezoidal(cl, cr, lw, rw)


def level_set(A: FuzzyNumber, gamma: float) -> tuple[float, float]:
    """Return the interval ``[a1(gamma), a2(gamma)]``."""
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma must lie in [0, 1], got {gamma}")
    return float(A.lower(gamma)), float(A.upper(gamma))


def linear_combination(terms: Sequence[tuple[float, FuzzyNumber]]) -> FuzzyNumber:
    """Sum of ``lam * A`` over ``terms``, computed endpoint by endpoint.

    A negative coefficient swaps the endpoints. Combinations of triangular,
    trapezoidal and point numbers stay in that family; anything involving a
    sampled number is sampled on the union of the input grids.
    """
    terms = [(float(lam), A) for lam, A in terms]
    if not terms:
        raise ValidationError("linear_combination needs at least one term")
    if all(A.kind in _LINEAR_KINDS for _, A in terms):
        cl = cr = lw = rw = 0.0
        for lam, A in terms:
            a_cl, a_cr, a_lw, a_rw = A._lr()
            if lam >= 0:
                cl += lam * a_cl
                cr += lam * a_cr
                lw += lam * a_lw
                rw += lam * a_rw
            else:
                cl += lam * a_cr
                cr += lam * a_cl
                lw -= lam * a_rw
                rw -= lam * a_lw
        return _from_lr(cl, cr, lw, rw)

    grid = np.unique(np.concatenate([np.asarray(A.breakpoints()) for _, A in terms]))
    lower = np.zeros_like(grid)
    upper = np.zeros_like(grid)
    for lam, A in terms:
        lo, hi = A.lower(grid), A.upper(grid)
        if lam >= 0:
            lower += lam * lo
            upper += lam * hi
        else:
            lower += lam * hi
            upper += lam * lo
    # guard rounding against the monotonicity checks
    lower = np.maximum.accumulate(lower)
    upper = np.minimum.accumulate(upper)
    return FuzzyNumber.sampled(zip(grid, lower, upper))


# ---------------------------------------------------------------------------
# Indicators
# ---------------------------------------------------------------------------


def level_weights(f: WeightingFunction, q: QuadratureConfig | None = None):
    """Return ``(gamma, w)`` with ``w = 1/2 * quadrature weight * f(gamma)``.

    With these weights, ``sum(w * (phi(a1) + phi(a2)))`` approximates
    ``1/2 int [phi(a1) + phi(a2)] f``. The weights are rescaled so that
    ``2 * sum(w) == 1``: the discrete rule is then itself a normalized
    measure and the shortcut identities for variance and covariance hold to
    rounding even when ``f`` is not polynomial.
    """
    return _level_weights(f, q if q is not None else QuadratureConfig())


def _jacobi_nodes(node_count: int, exponent: float):
    x, w = roots_jacobi(node_count, 0.0, exponent)
    return 0.5 * (x + 1.0), w


@functools.lru_cache(maxsize=256)
def _level_weights(f: WeightingFunction, q: QuadratureConfig):
    require_valid_weighting(f)
    if f.kind == "power" and q.rule == "gauss_legendre" and not float(f.exponent).is_integer():
        # gamma**n is not smooth at 0; fold it into a Gauss-Jacobi rule instead
        gamma, w = _jacobi_nodes(q.node_count, float(f.exponent))
    else:
        gamma, weights = q.nodes()
        w = weights * f(gamma)
    w = 0.5 * w / math.fsum(w)
    w.flags.writeable = False
    return gamma, w


def expected_value(f: WeightingFunction, A: FuzzyNumber, q: QuadratureConfig | None = None) -> float:
    if A.kind == "point":
        require_valid_weighting(f)
        return A.params[0]
    gamma, w = level_weights(f, q)
    return float(w @ (A.lower(gamma) + A.upper(gamma)))


def variance(f: WeightingFunction, A: FuzzyNumber, q: QuadratureConfig | None = None) -> float:
    if A.kind == "point":
        require_valid_weighting(f)
        return 0.0
    gamma, w = level_weights(f, q)
    m = expected_value(f, A, q)
    return float(w @ ((A.lower(gamma) - m) ** 2 + (A.upper(gamma) - m) ** 2))


def covariance(
    f: WeightingFunction, A: FuzzyNumber, B: FuzzyNumber, q: QuadratureConfig | None = None
) -> float:
    gamma, w = level_weights(f, q)
    a1, a2 = A.lower(gamma), A.upper(gamma)
    b1, b2 = B.lower(gamma), B.upper(gamma)
    ma = expected_value(f, A, q)
    mb = expected_value(f, B, q)
    return float(w @ ((a1 - ma) * (b1 - mb) + (a2 - ma) * (b2 - mb)))
