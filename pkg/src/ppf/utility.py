"""One-dimensional utility functions with analytic first and second
derivatives, the Arrow-Pratt index, and risk-aversion comparisons.

Built-in families::

    cara(lam)     u(w) = -exp(-lam * w)          all w
    crra(rho)     u(w) = w**(1 - rho) / (1 - rho)  w > 0
    log           u(w) = ln(w)                   w > 0
    quadratic(b)  u(w) = w - b * w**2            w < 1 / (2b)

Evaluating outside the domain raises :class:`~ppf.errors.DomainError`
naming the offending wealth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DomainError, ValidationError


@dataclass(frozen=True)
class UtilityFunction:
    family: str
    params: tuple = ()
    # only used by the custom family
    u: Callable | None = None
    du: Callable | None = None
    d2u: Callable | None = None
    domain: tuple[float, float] = (-math.inf, math.inf)

    @classmethod
    def cara(cls, lam: float) -> "UtilityFunction":
        if not lam > 0:
            raise ValidationError(f"CARA coefficient must be positive, got {lam}")
        return cls("cara", (float(lam),))

    @classmethod
    def crra(cls, rho: float) -> "UtilityFunction":
        if not rho > 0 or rho == 1:
            raise ValidationError(f"CRRA coefficient must be positive and != 1, got {rho}")
        return cls("crra", (float(rho),), domain=(0.0, math.inf))

    @classmethod
    def log(cls) -> "UtilityFunction":
        return cls("log", (), domain=(0.0, math.inf))

    @classmethod
    def quadratic(cls, b: float) -> "UtilityFunction":
        if not b > 0:
            raise ValidationError(f"quadratic coefficient must be positive, got {b}")
        return cls("quadratic", (float(b),), domain=(-math.inf, 1.0 / (2.0 * b)))

    @classmethod
    def custom(cls, u, du, d2u, domain=(-math.inf, math.inf), name="custom") -> "UtilityFunction":
        return cls("custom", (name,), u=u, du=du, d2u=d2u, domain=tuple(domain))

    @property
    def is_dara(self) -> bool:
        """Whether the family has strictly decreasing absolute risk aversion."""
        return self.family in ("crra", "log")

    def in_domain(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        lo, hi = self.domain
        return (w > lo) & (w < hi)

    def check_domain(self, w) -> None:
        ok = self.in_domain(w)
        if not np.all(ok):
            bad = float(np.asarray(w, dtype=float)[~ok].flat[0])
            raise DomainError(
                f"wealth {bad!r} is outside the domain {self.domain} of the {self.family} utility"
            )

    def value(self, w):
        self.check_domain(w)
        w = np.asarray(w, dtype=float)
        fam, p = self.family, self.params
        if fam == "cara":
            return -np.exp(-p[0] * w)
        if fam == "crra":
            return w ** (1.0 - p[0]) / (1.0 - p[0])
        if fam == "log":
            return np.log(w)
        if fam == "quadratic":
            return w - p[0] * w * w
        return np.asarray(self.u(w), dtype=float)

    __call__ = value

    def d1(self, w):
        self.check_domain(w)
        w = np.asarray(w, dtype=float)
        fam, p = self.family, self.params
        if fam == "cara":
            return p[0] * np.exp(-p[0] * w)
        if fam == "crra":
            return w ** (-p[0])
        if fam == "log":
            return 1.0 / w
        if fam == "quadratic":
            return 1.0 - 2.0 * p[0] * w
        return np.asarray(self.du(w), dtype=float)

    def d2(self, w):
        self.check_domain(w)
        w = np.asarray(w, dtype=float)
        fam, p = self.family, self.params
        if fam == "cara":
            return -p[0] * p[0] * np.exp(-p[0] * w)
        if fam == "crra":
            return -p[0] * w ** (-p[0] - 1.0)
        if fam == "log":
            return -1.0 / (w * w)
        if fam == "quadratic":
            return np.full_like(w, -2.0 * p[0])
        return np.asarray(self.d2u(w), dtype=float)

    def __repr__(self):
        if self.family == "custom":
            return f"UtilityFunction.custom({self.params[0]!r})"
        args = ", ".join(f"{v:g}" for v in self.params)
        return f"UtilityFunction.{self.family}({args})"


cara = UtilityFunction.cara
crra = UtilityFunction.crra
log_utility = UtilityFunction.log
quadratic = UtilityFunction.quadratic


def arrow_pratt(u: UtilityFunction, w):
    """Absolute risk aversion ``-u''(w) / u'(w)``."""
    out = -u.d2(w) / u.d1(w)
    return float(out) if np.ndim(out) == 0 else out


def more_risk_averse(u1: UtilityFunction, u2: UtilityFunction, grid: Sequence[float]) -> bool:
    """True iff ``r_u1(w) >= r_u2(w)`` at every grid point."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValidationError("more_risk_averse needs a non-empty grid")
    return bool(np.all(arrow_pratt(u1, grid) >= arrow_pratt(u2, grid)))


class DerivativeReport(NamedTuple):
    passed: bool
    failures: tuple[str, ...]


def check_derivatives(u: UtilityFunction, grid: Sequence[float], rel_tol: float = 1e-5) -> DerivativeReport:
    """Compare ``u'`` and ``u''`` against central differences and check signs."""
    failures = []
    for w in np.asarray(grid, dtype=float):
        h = 1e-5 * max(1.0, abs(w))
        # keep the stencil inside the domain
        lo, hi = u.domain
        h = min(h, 0.5 * (w - lo), 0.5 * (hi - w))
        d1, d2 = float(u.d1(w)), float(u.d2(w))
        fd1 = float(u.value(w + h) - u.value(w - h)) / (2 * h)
        fd2 = float(u.d1(w + h) - u.d1(w - h)) / (2 * h)
        if abs(fd1 - d1) > rel_tol * max(abs(d1), 1e-300):
            failures.append(f"u' mismatch at w={w:g}: analytic {d1:.10g}, finite difference {fd1:.10g}")
        if abs(fd2 - d2) > rel_tol * max(abs(d2), 1e-300):
            failures.append(f"u'' mismatch at w={w:g}: analytic {d2:.10g}, finite difference {fd2:.10g}")
        if not d1 > 0:
            failures.append(f"u' not positive at w={w:g}")
        if not d2 < 0:
            failures.append(f"u'' not negative at w={w:g}")
    return DerivativeReport(not failures, tuple(failures))
