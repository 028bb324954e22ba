"""Possibilistic mean, variance and covariance of a few fuzzy numbers.

Run with ``python3 demos/indicators.py``.
"""

from ppf import WeightingFunction, covariance, expected_value, trapezoidal, triangular, validate_weighting, variance

f = WeightingFunction.power(1)  # f(g) = 2g, levels near the core count more

returns = {
    "symmetric": triangular(0.08, 0.03, 0.03),
    "right-skewed": triangular(0.05, 0.02, 0.12),
    "flat top": trapezoidal(0.04, 0.09, 0.03, 0.03),
}

print(f"{'risk':<14}{'support':>18}{'mean':>12}{'variance':>14}")
for name, A in returns.items():
    lo, hi = A.support
    print(f"{name:<14}{f'[{lo:.3f}, {hi:.3f}]':>18}{expected_value(f, A):>12.6f}{variance(f, A):>14.3e}")

# Skew moves the mean toward the long tail: center + (right - left) / 6.
A = returns["right-skewed"]
print("\nskewed mean by hand:", 0.05 + (0.12 - 0.02) / 6)

# Covariance comes from matching level-set endpoints, so two risks that
# widen together covary even though nothing random is involved.
B = triangular(0.0, 0.02, 0.1)
print("Cov(A, B)  =", covariance(f, A, B))
# Negation swaps the endpoints: the long tail of -B points the other way.
print("Cov(A, -B) =", covariance(f, A, -1 * B))

# A different weighting changes every indicator.
for label, g in (("uniform", WeightingFunction.uniform()), ("power(3)", WeightingFunction.power(3))):
    print(f"{label:>10}: mean {expected_value(g, A):.6f}, variance {variance(g, A):.3e}")

print("\n3g as a weighting:", validate_weighting(WeightingFunction.custom(lambda g: 3 * g)).messages)
