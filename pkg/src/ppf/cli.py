"""Command line interface.

    ppf indicators SCENARIO     possibilistic and probabilistic indicators
    ppf solve SCENARIO          exact and approximate allocation of the scenario's model
    ppf compare SCENARIO        every model the scenario's risks can instantiate
    ppf sweep SCENARIO          wealth and/or risk-scale sweeps
    ppf selftest --seed S       randomized identity checks

Exit status: 0 success, 2 invalid input, 3 solver or degenerate-input error.
"""

from __future__ import annotations

import argparse
import json
import sys


from . import portfolio as pf
from .errors import DegenerateInputError, DomainError, SolverError, ValidationError
from .fuzzy import covariance, expected_value, variance
from .portfolio import ModelTag
from .scenario import Scenario, ScenarioError, parse_scenario

EXIT_OK = 0
EXIT_FAILED_CHECKS = 1
EXIT_INVALID = 2
EXIT_SOLVER = 3

BASELINE_TOL = 1e-10


class ReportError(Exception):
    """Carries a partial report together with the exit status it implies."""

    def __init__(self, report, status):
        super().__init__(report.get("error", ""))
        self.report = report
        self.status = status


# ---------------------------------------------------------------------------
# report builders
# ---------------------------------------------------------------------------


def indicator_report(scenario: Scenario) -> dict:
    f, q, r = scenario.weighting, scenario.quadrature, scenario.market.r
    out = {"command": "indicators", "r": r, "w": scenario.market.w}
    for role in ("investment", "background"):
        fz = getattr(scenario, f"{role}_fuzzy")
        rv = getattr(scenario, f"{role}_random")
        if fz is not None:
            lo, hi = fz.support
            out[f"{role}_fuzzy"] = {
                "mean": expected_value(f, fz, q),
                "variance": variance(f, fz, q),
                "support_low": lo,
                "support_high": hi,
            }
        if rv is not None:
            out[f"{role}_random"] = {
                "mean": rv.mean(),
                "variance": rv.second_moment_about(rv.mean()),
                "second_moment_about_r": rv.second_moment_about(r),
            }
    if scenario.investment_fuzzy is not None and scenario.background_fuzzy is not None:
        out["covariance_fuzzy"] = covariance(f, scenario.investment_fuzzy, scenario.background_fuzzy, q)
    return out


def _solve_entry(m: pf.ModelSpec, tol: float) -> dict:
    """Everything known about one model; ``error`` is set when the exact solve fails."""
    entry = {"model": m.tag.name}
    try:
        approx = pf.alpha_approx(m)
        entry["indicators"] = approx.indicators.as_dict()
        entry["alpha_approx"] = approx.alpha
    except DegenerateInputError as exc:
        entry["indicators"] = pf.indicators(m).as_dict()
        entry["alpha_approx"] = None
        entry["approx_status"] = str(exc)
    try:
        s = pf.solve_exact(m, tol=tol)
    except (SolverError, DomainError) as exc:
        entry["alpha_exact"] = None
        entry["solver"] = {"status": f"{type(exc).__name__}: {exc}"}
        entry["error"] = str(exc)
        return entry
    entry["alpha_exact"] = s.alpha_exact
    if s.degenerate:
        entry["alpha_approx"] = s.alpha_approx
    if entry["alpha_approx"] is not None:
        entry["gap"] = s.alpha_exact - entry["alpha_approx"]
    entry["solver"] = {
        "status": "degenerate: riskless asset at the bond rate, alpha=0 by convention" if s.degenerate else "converged",
        "iterations": s.iterations,
        "bracket_low": s.bracket[0],
        "bracket_high": s.bracket[1],
        "derivative_at_exact": s.derivative_at_exact,
        "objective_at_exact": s.objective_at_exact,
    }
    return entry


def _background_entries(m: pf.ModelSpec) -> dict:
    out = {}
    if m.tag is ModelTag.M1:
        return out
    try:
        out["background_adjustment"] = pf.background_adjustment(m)
    except DegenerateInputError:
        pass
    if m.tag in (ModelTag.M2, ModelTag.M3):
        cond = pf.ordering_condition(m)
        out["ordering_condition"] = {"predicted_background_lowers_alpha": cond.predicted, "value": cond.value}
        if m.tag is ModelTag.M2:
            threshold = pf.rate_threshold(m)
            if threshold is not None:
                out["ordering_condition"]["rate_threshold"] = threshold
    return out


def run(scenario: Scenario, tol: float = pf.SOLVER_TOL) -> dict:
    """Solve the scenario's model; raises :class:`ReportError` carrying the
    partial report if the exact solve fails."""
    m = scenario.model_spec()
    report = {"command": "solve"}
    report.update(_solve_entry(m, tol))
    report.update(_background_entries(m))
    flags = []
    ind = report["indicators"]
    mean = ind.get("mean_a", ind.get("mean_x"))
    if mean is not None and abs(mean - m.r) <= 1e-12 * max(1.0, abs(m.r)):
        flags.append("mossin: mean return equals the bond rate, optimal allocation is zero")
    if m.tag in (ModelTag.M2, ModelTag.M3):
        base = _solve_entry(pf.strip_background(m), tol)
        report["baseline_M1"] = {"alpha_exact": base.get("alpha_exact"), "alpha_approx": base.get("alpha_approx")}
        same = all(
            report.get(k) is not None and base.get(k) is not None and abs(report[k] - base[k]) <= BASELINE_TOL
            for k in ("alpha_exact", "alpha_approx")
        )
        if same:
            flags.append("background has no effect: allocation equals the M1 baseline")
    report["flags"] = flags
    if report.pop("error", None) is not None:
        raise ReportError(report, EXIT_SOLVER)
    return report


def compare(scenario: Scenario, tol: float = pf.SOLVER_TOL) -> dict:
    tags = scenario.available_models()
    if not tags:
        raise ScenarioError("no model can be built: a fuzzy investment risk (M1-M3) or a random "
                            "investment risk with a fuzzy background (M4) is required")
    rows, notes = [], []
    adjustments = {}
    failed = False
    for tag in tags:
        m = scenario.model_spec(tag)
        entry = _solve_entry(m, tol)
        bg = _background_entries(m)
        row = {
            "model": tag.name,
            "alpha_approx": entry.get("alpha_approx"),
            "alpha_exact": entry.get("alpha_exact"),
            "gap": entry.get("gap"),
            "background_adjustment": bg.get("background_adjustment"),
            "ordering_value": bg.get("ordering_condition", {}).get("value"),
        }
        if "error" in entry:
            failed = True
            notes.append(f"{tag.name}: {entry['solver']['status']}")
        adjustments[tag] = row["background_adjustment"]
        rows.append(row)
    missing = []
    if scenario.investment_fuzzy is not None:
        if scenario.background_fuzzy is None:
            missing.append("M2 needs a fuzzy background risk")
        if scenario.background_random is None:
            missing.append("M3 needs a random background risk")
    if scenario.investment_random is None:
        missing.append("M4 needs a random investment risk")
    elif scenario.background_fuzzy is None:
        missing.append("M4 needs a fuzzy background risk")
    notes.extend(missing)
    report = {"command": "compare", "models": rows}
    if ModelTag.M2 in adjustments and ModelTag.M3 in adjustments:
        m2 = scenario.model_spec(ModelTag.M2)
        ind = pf.indicators(m2)
        denom = ind.var_a + (ind.mean_a - m2.r) ** 2
        report["m2_minus_m3_adjustment"] = adjustments[ModelTag.M2] - adjustments[ModelTag.M3]
        report["covariance_term"] = -ind.cov_ab / denom
    report["notes"] = notes
    if failed:
        raise ReportError(report, EXIT_SOLVER)
    return report


def sweep(scenario: Scenario, tol: float = pf.SOLVER_TOL) -> dict:
    if scenario.sweep is None:
        raise ScenarioError("scenario has no sweep section")
    m = scenario.model_spec()
    report = {"command": "sweep", "model": m.tag.name}
    if scenario.sweep.wealth is not None:
        res = pf.wealth_sweep(m, scenario.sweep.wealth)
        report["wealth"] = [row._asdict() for row in res.rows]
        report["dara_violations"] = res.violations
    if scenario.sweep.risk_scale is not None:
        rows = []
        for eps in scenario.sweep.risk_scale:
            s = pf.solve_exact(pf.scale_risks(m, eps), tol=tol)
            rel = abs(s.alpha_exact - s.alpha_approx) / abs(s.alpha_exact) if s.alpha_exact else None
            rows.append({"scale": eps, "alpha_exact": s.alpha_exact, "alpha_approx": s.alpha_approx,
                         "relative_gap": rel})
        report["risk_scale"] = rows
    return report


def selftest(seed: int, count: int = 50) -> dict:
    """Randomized identity checks; each entry records the worst error seen."""
    from .selfcheck import run_checks

    return {"command": "selftest", "seed": seed, "checks": run_checks(seed, count)}


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def _flatten(obj, prefix=""):
    for key, value in obj.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            yield from _flatten(value, name + ".")
        else:
            yield name, value


def render_table(report: dict) -> str:
    lines = []
    scalars = [(k, v) for k, v in report.items() if not (isinstance(v, list) and v and isinstance(v[0], dict))]
    tables = [(k, v) for k, v in report.items() if isinstance(v, list) and v and isinstance(v[0], dict)]
    flat = [(k, v) for k, v in _flatten(dict(scalars)) if not isinstance(v, list)]
    lists = [(k, v) for k, v in _flatten(dict(scalars)) if isinstance(v, list)]
    width = max((len(k) for k, _ in flat), default=0)
    for key, value in flat:
        lines.append(f"{key:<{width}}  {fmt(value)}")
    for key, rows in tables:
        cols = list(rows[0])
        cells = [[fmt(row.get(c)) for c in cols] for row in rows]
        widths = [max(len(c), *(len(r[i]) for r in cells)) for i, c in enumerate(cols)]
        lines.append("")
        lines.append(f"[{key}]")
        lines.append("  ".join(c.ljust(wd) for c, wd in zip(cols, widths)))
        for r in cells:
            lines.append("  ".join(v.ljust(wd) for v, wd in zip(r, widths)))
    for key, items in lists:
        if items:
            lines.append("")
            lines.append(f"[{key}]")
            lines.extend(f"  {fmt(item)}" for item in items)
    return "\n".join(lines)


def render_json(report: dict) -> str:
    # json.dumps writes floats with the shortest repr that round-trips
    return json.dumps(report, indent=2, allow_nan=True)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ppf", description=__doc__.split("\n\n")[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=["table", "json"], default="table")
    common.add_argument("--nodes", type=int, default=None, help="quadrature node count")
    common.add_argument("--tolerance", type=float, default=pf.SOLVER_TOL,
                        help="bound on |dK/dalpha| at the exact solution")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("indicators", "possibilistic and probabilistic indicators of the scenario's risks"),
        ("solve", "exact and approximate optimal allocation"),
        ("compare", "allocations across every model the scenario supports"),
        ("sweep", "re-solve over the scenario's wealth or risk-scale grid"),
    ]:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("scenario", help="path to a scenario JSON file")
    p = sub.add_parser("selftest", parents=[common], help="randomized identity checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=50, help="random instances per check")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    render = render_json if args.output == "json" else render_table

    if args.command == "selftest":
        report = selftest(args.seed, args.count)
        print(render(report))
        return EXIT_OK if all(c["passed"] for c in report["checks"]) else EXIT_FAILED_CHECKS

    try:
        scenario = parse_scenario(args.scenario, node_override=args.nodes)
        builder = {"indicators": lambda s: indicator_report(s), "solve": run, "compare": compare, "sweep": sweep}
        report = builder[args.command](scenario) if args.command == "indicators" else \
            builder[args.command](scenario, args.tolerance)
    except ReportError as exc:
        print(render(exc.report))
        return exc.status
    except (ScenarioError, ValidationError) as exc:
        print(f"ppf: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SolverError, DegenerateInputError, DomainError) as exc:
        print(f"ppf: {args.scenario}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    print(render(report))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
