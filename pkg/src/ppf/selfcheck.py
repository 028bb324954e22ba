"""Random instance generators and the randomized checks behind ``ppf selftest``."""

from __future__ import annotations

import numpy as np

from . import portfolio as pf
from .fuzzy import FuzzyNumber, WeightingFunction, covariance, expected_value, level_weights, variance
from .portfolio import MarketSpec, ModelSpec, ModelTag
from .stochastic import DiscreteRandomVariable
from .utility import UtilityFunction


def random_fuzzy(rng, center=(-1.0, 1.0), width=(0.0, 1.0), trapezoid_prob=0.5) -> FuzzyNumber:
    c = rng.uniform(*center)
    lw, rw = rng.uniform(*width, size=2)
    if rng.random() < trapezoid_prob:
        core = rng.uniform(0.0, width[1])
        return FuzzyNumber.trapezoidal(c, c + core, lw, rw)
    return FuzzyNumber.triangular(c, lw, rw)


def random_discrete(rng, low, high, atoms=(2, 6)) -> DiscreteRandomVariable:
    n = rng.integers(atoms[0], atoms[1] + 1)
    values = rng.uniform(low, high, size=n)
    p = rng.uniform(0.1, 1.0, size=n)
    p = p / p.sum()
    return DiscreteRandomVariable(tuple(values.tolist()), tuple(p.tolist()))


def random_weighting(rng) -> WeightingFunction:
    if rng.random() < 0.2:
        return WeightingFunction.uniform()
    return WeightingFunction.power(float(rng.choice([0.5, 1.0, 2.0, 3.0])))


def random_investment(rng, tag: ModelTag, r: float):
    """An investment risk whose reachable excess returns take both signs."""
    if tag is ModelTag.M4:
        lo = r - rng.uniform(0.05, 0.3)
        hi = r + rng.uniform(0.05, 0.3)
        X = random_discrete(rng, lo, hi)
        while min(X.values) >= r or max(X.values) <= r:
            X = random_discrete(rng, lo, hi)
        return X
    c = r + rng.uniform(-0.05, 0.08)
    lw, rw = rng.uniform(0.1, 0.4, size=2)
    if rng.random() < 0.5:
        core = rng.uniform(0.0, 0.05)
        return FuzzyNumber.trapezoidal(c - core / 2, c + core / 2, lw, rw)
    return FuzzyNumber.triangular(c, lw, rw)


def random_background(rng, tag: ModelTag, scale: float = 0.3, mean=None):
    if tag is ModelTag.M1:
        return None
    if tag is ModelTag.M3:
        Y = random_discrete(rng, -scale, scale)
        if mean is not None:
            Y = Y.shifted(mean - Y.mean())
        return Y
    c = rng.uniform(-scale, scale) / 2
    lw, rw = rng.uniform(0.0, scale / 2, size=2)
    B = FuzzyNumber.triangular(c, lw, rw)
    if mean is not None:
        f = WeightingFunction.power(1)
        B = B + (mean - expected_value(f, B))
    return B


def random_quadratic_model(rng, tag: ModelTag, margin: float = 0.9, f=None, background=None) -> ModelSpec:
    """Model with quadratic utility whose optimal reachable wealths stay
    below the bliss point, with and without the background risk."""
    while True:
        r = rng.uniform(0.0, 0.05)
        w0 = rng.uniform(0.5, 2.0)
        inv = random_investment(rng, tag, r)
        bg = random_background(rng, tag) if background is None else background
        f = f or WeightingFunction.power(1)
        # temporary utility; the closed-form pieces below do not depend on it
        probe = ModelSpec(tag, MarketSpec.from_w0(w0, r), inv, UtilityFunction.cara(1.0), bg, f)
        ind = pf.indicators(probe)
        excess, denom, numer = pf._terms(probe, ind)
        k, c = excess / denom, numer / denom
        y, z = pf.reachable_offsets(probe)
        if np.any(k * z >= margin - 0.05):
            continue
        # need y + (T k - c) z < margin * T; without background y = c = 0 holds for any T > 0
        need = max(float(np.max((y - c * z) / (margin - k * z))), float(np.max(y)) / margin, 1e-3)
        T = need * rng.uniform(1.2, 3.0)
        w = probe.w
        u = UtilityFunction.quadratic(1.0 / (2.0 * (w + T)))
        return ModelSpec(tag, probe.market, inv, u, bg, f)


def random_cara_model(rng, tag: ModelTag = ModelTag.M1, lam=None, f=None) -> ModelSpec:
    r = rng.uniform(0.0, 0.05)
    lam = rng.uniform(0.5, 5.0) if lam is None else lam
    return ModelSpec(
        tag,
        MarketSpec.from_w0(rng.uniform(0.5, 2.0), r),
        random_investment(rng, tag, r),
        UtilityFunction.cara(lam),
        random_background(rng, tag),
        f or WeightingFunction.power(1),
    )


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def _check(name, errors, tol):
    worst = float(max(errors)) if errors else 0.0
    return {"name": name, "passed": worst <= tol, "max_error": worst, "tolerance": tol}


def run_checks(seed: int, count: int = 50) -> list[dict]:
    rng = np.random.default_rng(seed)
    ident, linear, var_id, quad, collapse = [], [], [], [], []
    for _ in range(count):
        f = random_weighting(rng)
        A, B = random_fuzzy(rng), random_fuzzy(rng)
        gamma, w = level_weights(f)
        ea, eb = expected_value(f, A), expected_value(f, B)
        raw = float(w @ (A.lower(gamma) * B.lower(gamma) + A.upper(gamma) * B.upper(gamma)))
        ident.append(abs(covariance(f, A, B) - (raw - ea * eb)))
        raw2 = float(w @ (A.lower(gamma) ** 2 + A.upper(gamma) ** 2))
        var_id.append(abs(variance(f, A) - (raw2 - ea * ea)))
        lam = rng.normal(size=2)
        combo = lam[0] * A + lam[1] * B
        linear.append(abs(expected_value(f, combo) - (lam[0] * ea + lam[1] * eb)))

    for i in range(max(4, count // 5)):
        tag = list(ModelTag)[i % 4]
        m = random_quadratic_model(rng, tag)
        s = pf.solve_exact(m)
        quad.append(abs(s.alpha_exact - s.alpha_approx) / (1.0 + abs(s.alpha_exact)))
        m1 = random_cara_model(rng)
        m2 = ModelSpec(ModelTag.M2, m1.market, m1.investment, m1.u, FuzzyNumber.point(0.0), m1.f)
        m3 = ModelSpec(ModelTag.M3, m1.market, m1.investment, m1.u, DiscreteRandomVariable.degenerate(0.0), m1.f)
        s1, s2, s3 = (pf.solve_exact(x) for x in (m1, m2, m3))
        collapse.append(max(abs(s1.alpha_exact - s2.alpha_exact), abs(s1.alpha_exact - s3.alpha_exact),
                            abs(s1.alpha_approx - s2.alpha_approx), abs(s1.alpha_approx - s3.alpha_approx)))
    return [
        _check("covariance shortcut identity", ident, 1e-10),
        _check("variance shortcut identity", var_id, 1e-10),
        _check("linearity of the possibilistic mean", linear, 1e-10),
        _check("quadratic utility: exact equals closed form", quad, 1e-7),
        _check("zero background collapses to M1", collapse, 1e-10),
    ]
