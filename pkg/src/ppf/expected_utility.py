"""Possibilistic, probabilistic and mixed expected utilities.

For fuzzy numbers ``A_1..A_n`` with level sets ``[a_i(g), b_i(g)]`` and
random variables ``X_1..X_m``::

    possibilistic   1/2 int [u(a(g)) + u(b(g))] f(g) dg
    probabilistic   M[u(X)]
    mixed           1/2 int [M u(a(g), X) + M u(b(g), X)] f(g) dg

Random components are combined under the product measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ValidationError
from .fuzzy import FuzzyNumber, QuadratureConfig, WeightingFunction, level_weights
from .stochastic import DiscreteRandomVariable


@dataclass(frozen=True)
class MultiUtility:
    """An ``arity``-argument function evaluated elementwise on numpy arrays."""

    arity: int
    evaluator: Callable

    def __call__(self, *args):
        if len(args) != self.arity:
            raise ValidationError(f"utility expects {self.arity} arguments, got {len(args)}")
        return np.asarray(self.evaluator(*args), dtype=float)


def _check_arity(u: MultiUtility, n: int):
    if u.arity != n:
        raise ValidationError(f"utility arity {u.arity} does not match {n} risk components")


def _product_atoms(Xs: Sequence[DiscreteRandomVariable]):
    """Joint atoms of independent variables: (list of value arrays, probabilities)."""
    grids = np.meshgrid(*[np.asarray(X.values) for X in Xs], indexing="ij")
    probs = np.ones(grids[0].shape)
    for axis, X in enumerate(Xs):
        shape = [1] * len(Xs)
        shape[axis] = -1
        probs = probs * np.asarray(X.probabilities).reshape(shape)
    return [g.ravel() for g in grids], probs.ravel()


def possibilistic_eu(
    f: WeightingFunction,
    u: MultiUtility,
    As: Sequence[FuzzyNumber],
    q: QuadratureConfig | None = None,
) -> float:
    _check_arity(u, len(As))
    gamma, w = level_weights(f, q)
    lower = [A.lower(gamma) for A in As]
    upper = [A.upper(gamma) for A in As]
    shape = gamma.shape
    return float(w @ (np.broadcast_to(u(*lower), shape) + np.broadcast_to(u(*upper), shape)))


def probabilistic_eu(u: MultiUtility, Xs: Sequence[DiscreteRandomVariable]) -> float:
    _check_arity(u, len(Xs))
    if not Xs:
        return float(u())
    values, probs = _product_atoms(Xs)
    return float(probs @ np.broadcast_to(u(*values), probs.shape))


def mixed_eu(
    f: WeightingFunction,
    u: MultiUtility,
    As: Sequence[FuzzyNumber],
    Xs: Sequence[DiscreteRandomVariable],
    q: QuadratureConfig | None = None,
) -> float:
    """Fuzzy arguments come first in ``u``'s signature, random ones after."""
    _check_arity(u, len(As) + len(Xs))
    if not As:
        return probabilistic_eu(u, Xs)
    if not Xs:
        return possibilistic_eu(f, u, As, q)
    gamma, w = level_weights(f, q)
    values, probs = _product_atoms(Xs)
    # (nodes, 1) against (1, atoms)
    lower = [A.lower(gamma)[:, None] for A in As]
    upper = [A.upper(gamma)[:, None] for A in As]
    rand = [v[None, :] for v in values]
    # u may ignore some arguments, so broadcast to the full (nodes, atoms) grid
    shape = (gamma.size, probs.size)
    m_lower = np.broadcast_to(u(*lower, *rand), shape) @ probs
    m_upper = np.broadcast_to(u(*upper, *rand), shape) @ probs
    return float(w @ (m_lower + m_upper))
