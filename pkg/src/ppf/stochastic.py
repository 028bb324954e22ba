"""Finite discrete random variables.

Probabilistic risks are lists of ``(value, probability)`` atoms. Continuous
normal risks enter through :func:`discretize_normal`, which places the atoms
at Gauss-Hermite nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, ValidationError

PROBABILITY_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteRandomVariable:
    values: tuple[float, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) == 0:
            raise ValidationError("a random variable needs at least one atom")
        if len(self.values) != len(self.probabilities):
            raise ValidationError("values and probabilities differ in length")
        if not all(math.isfinite(v) for v in self.values):
            raise ValidationError("atom values must be finite")
        if any(not p >= 0 for p in self.probabilities):
            raise ValidationError("probabilities must be non-negative")
        total = math.fsum(self.probabilities)
        if abs(total - 1.0) > PROBABILITY_TOL:
            raise ValidationError(f"probabilities sum to {total!r}, not 1")

    @classmethod
    def from_atoms(cls, atoms: Sequence[Sequence[float]]) -> "DiscreteRandomVariable":
        atoms = list(atoms)
        return cls(tuple(float(x) for x, _ in atoms), tuple(float(p) for _, p in atoms))

    @classmethod
    def degenerate(cls, value: float) -> "DiscreteRandomVariable":
        return cls((float(value),), (1.0,))

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.values, self.probabilities))

    @property
    def support(self) -> tuple[float, float]:
        return min(self.values), max(self.values)

    def mean(self) -> float:
        return expectation(self, lambda x: x)

    def second_moment_about(self, r: float) -> float:
        return expectation(self, lambda x: (x - r) ** 2)

    def shifted(self, c: float) -> "DiscreteRandomVariable":
        return DiscreteRandomVariable(tuple(v + c for v in self.values), self.probabilities)

    def scaled_about_mean(self, eps: float) -> "DiscreteRandomVariable":
        m = self.mean()
        return DiscreteRandomVariable(tuple(m + eps * (v - m) for v in self.values), self.probabilities)


def expectation(X: DiscreteRandomVariable, h: Callable = None) -> float:
    """Return ``sum(p_i * h(x_i))``; ``h`` defaults to the identity."""
    x = np.asarray(X.values)
    p = np.asarray(X.probabilities)
    hx = x if h is None else np.asarray(h(x), dtype=float)
    return float(p @ hx)


def discretize_normal(mu: float, sigma: float, n: int) -> DiscreteRandomVariable:
    """n-point Gauss-Hermite discretization of N(mu, sigma^2).

    Mean is matched exactly and variance to rounding for ``n >= 2``.
    """
    if sigma < 0:
        raise DomainError(f"sigma must be non-negative, got {sigma}")
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if sigma == 0 or n == 1:
        return DiscreteRandomVariable.degenerate(mu)
    x, w = np.polynomial.hermite.hermgauss(n)
    # nodes are symmetric; force exact antisymmetry so the mean is exact
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    p = w / w.sum()
    values = mu + math.sqrt(2.0) * sigma * x
    p = p / math.fsum(p)
    return DiscreteRandomVariable(tuple(values.tolist()), tuple(p.tolist()))
