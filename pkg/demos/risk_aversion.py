"""Comparative statics: more risk aversion, more wealth, smaller risks.

Run with ``python3 demos/risk_aversion.py``.
"""

from ppf import (
    MarketSpec,
    ModelSpec,
    ModelTag,
    NoInteriorOptimumError,
    UtilityFunction,
    risk_aversion_comparative,
    scale_risks,
    solve_exact,
    triangular,
    wealth_sweep,
)

market = MarketSpec.from_w0(1.0, 0.02)
A = triangular(0.05, 0.2, 0.25)

# Doubling the CARA coefficient halves the closed-form allocation.
timid = ModelSpec(ModelTag.M1, market, A, UtilityFunction.cara(4.0))
bold = timid.with_utility(UtilityFunction.cara(2.0))
rep = risk_aversion_comparative(timid, bold)
print(f"cara(4) vs cara(2): {rep.alpha_approx_1:.4f} vs {rep.alpha_approx_2:.4f}, ratio {rep.alpha_approx_1 / rep.alpha_approx_2:.3f}")

# CRRA has decreasing absolute risk aversion: richer investors hold more.
crra = ModelSpec(ModelTag.M1, market, A, UtilityFunction.crra(3.0))
sweep = wealth_sweep(crra, [1, 2, 4, 8])
print("\ncrra(3) wealth sweep")
for row in sweep.rows:
    print(f"  w={row.w:<4g} exact {row.alpha_exact:8.4f}  closed form {row.alpha_approx:8.4f}")
print("  monotonicity violations:", sweep.violations)

# Shrinking spread (by eps) and premium (by eps**2) together keeps the
# problem's shape and the closed form converges to the exact optimum.
cara = ModelSpec(ModelTag.M1, market, A, UtilityFunction.cara(2.0))
print("\nsmall-risk limit, cara(2)")
for eps in 1.0, 0.3, 0.1, 0.03, 0.01:
    s = solve_exact(scale_risks(cara, eps))
    rel = abs(s.alpha_exact - s.alpha_approx) / abs(s.alpha_exact)
    print(f"  eps={eps:<5g} relative gap {rel:.2e}")

# Log utility: wealth must stay positive at the edge of the support. Here
# the marginal gain is still positive where the worst return wipes the
# investor out, so there is no interior optimum.
risky = ModelSpec(ModelTag.M1, market, triangular(0.2, 0.4, 0.4), UtilityFunction.log())
try:
    solve_exact(risky)
except NoInteriorOptimumError as exc:
    print(f"\nlog utility, wide return: corner at alpha = {exc.boundary:.6f}")
milder = ModelSpec(ModelTag.M1, market, triangular(0.06, 0.3, 0.3), UtilityFunction.log())
print(f"log utility, milder return: alpha = {solve_exact(milder).alpha_exact:.6f}")
