"""JSON scenario files.

A scenario describes the market, the risks and the investor::

    {
      "model": "M2",
      "market": {"w0": 1.0, "r": 0.02},
      "investment": {"triangular": [0.08, 0.05, 0.05]},
      "background": {"fuzzy": {"triangular": [0.0, 0.1, 0.1]},
                     "random": {"normal": {"mean": 0.0, "std": 0.05, "nodes": 8}}},
      "weighting": {"power": 1},
      "utility": {"cara": 2},
      "quadrature": {"nodes": 64, "rule": "gauss_legendre"},
      "sweep": {"wealth": [1, 2, 4, 8], "risk_scale": [1, 0.1, 0.01]}
    }

``investment`` and ``background`` hold one risk literal, or an object with
``fuzzy`` and/or ``random`` encodings of the same risk. Fuzzy literals are
``triangular`` ``[center, left_width, right_width]``, ``trapezoidal``
``[core_left, core_right, left_width, right_width]``, ``point`` and
``sampled`` ``[[gamma, a1, a2], ...]``. Random literals are ``discrete``
``[[value, probability], ...]`` and ``normal`` ``{mean, std, nodes}``.
``market`` needs ``r`` and at least one of ``w0`` and ``w``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError
from .fuzzy import FuzzyNumber, QuadratureConfig, WeightingFunction, validate_weighting
from .portfolio import MarketSpec, ModelSpec, ModelTag
from .stochastic import DiscreteRandomVariable, discretize_normal
from .utility import UtilityFunction

FUZZY_KINDS = ("triangular", "trapezoidal", "point", "sampled")
RANDOM_KINDS = ("discrete", "normal")
TOP_LEVEL_KEYS = {"model", "market", "investment", "background", "weighting", "utility", "quadrature", "sweep"}


class ScenarioError(ValidationError):
    """Malformed or invalid scenario; ``line`` points into the source text when known."""

    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class Sweep:
    wealth: tuple[float, ...] | None = None
    risk_scale: tuple[float, ...] | None = None


@dataclass(frozen=True)
class Scenario:
    model: ModelTag | None
    market: MarketSpec
    utility: UtilityFunction
    investment_fuzzy: FuzzyNumber | None = None
    investment_random: DiscreteRandomVariable | None = None
    background_fuzzy: FuzzyNumber | None = None
    background_random: DiscreteRandomVariable | None = None
    weighting: WeightingFunction = field(default_factory=lambda: WeightingFunction.power(1))
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    sweep: Sweep | None = None

    def available_models(self) -> list[ModelTag]:
        out = []
        if self.investment_fuzzy is not None:
            out.append(ModelTag.M1)
            if self.background_fuzzy is not None:
                out.append(ModelTag.M2)
            if self.background_random is not None:
                out.append(ModelTag.M3)
        if self.investment_random is not None and self.background_fuzzy is not None:
            out.append(ModelTag.M4)
        return out

    def model_spec(self, tag: ModelTag | None = None) -> ModelSpec:
        tag = tag or self.model
        if tag is None:
            raise ScenarioError("scenario names no model")
        need = {
            ModelTag.M1: ("investment_fuzzy", None),
            ModelTag.M2: ("investment_fuzzy", "background_fuzzy"),
            ModelTag.M3: ("investment_fuzzy", "background_random"),
            ModelTag.M4: ("investment_random", "background_fuzzy"),
        }[tag]
        missing = [name for name in need if name and getattr(self, name) is None]
        if missing:
            raise ScenarioError(f"{tag.name} needs " + " and ".join(n.replace("_", " ") for n in missing))
        return ModelSpec(
            tag=tag,
            market=self.market,
            investment=getattr(self, need[0]),
            background=getattr(self, need[1]) if need[1] else None,
            u=self.utility,
            f=self.weighting,
            q=self.quadrature,
        )

    def to_dict(self) -> dict:
        doc = {}
        if self.model is not None:
            doc["model"] = self.model.name
        doc["market"] = {"w0": self.market.w0, "w": self.market.w, "r": self.market.r}
        for role in ("investment", "background"):
            enc = {}
            fz, rv = getattr(self, f"{role}_fuzzy"), getattr(self, f"{role}_random")
            if fz is not None:
                enc["fuzzy"] = fuzzy_literal(fz)
            if rv is not None:
                enc["random"] = {"discrete": [list(a) for a in rv.atoms]}
            if enc:
                doc[role] = enc
        doc["weighting"] = weighting_literal(self.weighting)
        doc["utility"] = utility_literal(self.utility)
        doc["quadrature"] = {"nodes": self.quadrature.node_count, "rule": self.quadrature.rule}
        if self.sweep is not None:
            sw = {}
            if self.sweep.wealth is not None:
                sw["wealth"] = list(self.sweep.wealth)
            if self.sweep.risk_scale is not None:
                sw["risk_scale"] = list(self.sweep.risk_scale)
            doc["sweep"] = sw
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# ---------------------------------------------------------------------------
# literals
# ---------------------------------------------------------------------------


def fuzzy_literal(A: FuzzyNumber) -> dict:
    if A.kind == "point":
        return {"point": A.params[0]}
    if A.kind == "sampled":
        return {"sampled": [list(row) for row in A.params]}
    return {A.kind: list(A.params)}


def weighting_literal(f: WeightingFunction) -> dict:
    if f.kind == "power":
        return {"power": f.exponent}
    if f.kind == "uniform":
        return {"uniform": {}}
    if f.kind == "polynomial":
        return {"polynomial": list(f.coefficients)}
    raise ScenarioError("custom weighting functions cannot be written to a scenario file")


def utility_literal(u: UtilityFunction) -> dict:
    if u.family == "log":
        return {"log": {}}
    if u.family == "custom":
        raise ScenarioError("custom utilities cannot be written to a scenario file")
    return {u.family: u.params[0]}


def _line_of(text: str | None, key: str) -> int | None:
    if not text:
        return None
    match = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, match.start()) + 1 if match else None


def _number(value, what, text, key):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ScenarioError(f"{what} must be a finite number, got {value!r}", _line_of(text, key))
    return float(value)


def _numbers(value, n, what, text, key):
    if not isinstance(value, list) or len(value) != n:
        raise ScenarioError(f"{what} needs a list of {n} numbers, got {value!r}", _line_of(text, key))
    return [_number(v, what, text, key) for v in value]


def _single_key(obj, what, text, anchor):
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ScenarioError(f"{what} must be an object with exactly one key, got {obj!r}", _line_of(text, anchor))
    return next(iter(obj.items()))


def parse_fuzzy(obj, text=None, anchor="investment") -> FuzzyNumber:
    kind, val = _single_key(obj, "fuzzy literal", text, anchor)
    try:
        if kind == "triangular":
            if isinstance(val, dict):
                val = [val.get("center"), val.get("left_width"), val.get("right_width")]
            return FuzzyNumber.triangular(*_numbers(val, 3, "triangular", text, kind))
        if kind == "trapezoidal":
            if isinstance(val, dict):
                val = [val.get(k) for k in ("core_left", "core_right", "left_width", "right_width")]
            return FuzzyNumber.trapezoidal(*_numbers(val, 4, "trapezoidal", text, kind))
        if kind == "point":
            return FuzzyNumber.point(_number(val, "point", text, kind))
        if kind == "sampled":
            if not isinstance(val, list):
                raise ScenarioError("sampled needs a list of [gamma, a1, a2] rows", _line_of(text, kind))
            return FuzzyNumber.sampled([_numbers(row, 3, "sampled row", text, kind) for row in val])
    except ScenarioError:
        raise
    except ValidationError as exc:
        raise ScenarioError(str(exc), _line_of(text, kind)) from None
    raise ScenarioError(f"unknown fuzzy number kind {kind!r}", _line_of(text, kind))


def parse_random(obj, text=None, anchor="investment") -> DiscreteRandomVariable:
    kind, val = _single_key(obj, "random literal", text, anchor)
    try:
        if kind == "discrete":
            if not isinstance(val, list) or not val:
                raise ScenarioError("discrete needs a non-empty list of [value, probability] atoms",
                                    _line_of(text, kind))
            return DiscreteRandomVariable.from_atoms([_numbers(a, 2, "atom", text, kind) for a in val])
        if kind == "normal":
            if not isinstance(val, dict) or "mean" not in val or "std" not in val:
                raise ScenarioError("normal needs an object with mean, std and optional nodes",
                                    _line_of(text, kind))
            nodes = val.get("nodes", 8)
            if not isinstance(nodes, int) or isinstance(nodes, bool):
                raise ScenarioError(f"normal nodes must be an integer, got {nodes!r}", _line_of(text, kind))
            return discretize_normal(_number(val["mean"], "mean", text, kind),
                                     _number(val["std"], "std", text, kind), nodes)
    except ScenarioError:
        raise
    except (ValidationError, ValueError) as exc:
        raise ScenarioError(str(exc), _line_of(text, kind)) from None
    raise ScenarioError(f"unknown random variable kind {kind!r}", _line_of(text, kind))


def _parse_risk(obj, role, text):
    """Return ``(fuzzy, random)`` encodings of one risk."""
    if obj is None:
        return None, None
    if not isinstance(obj, dict) or not obj:
        raise ScenarioError(f"{role} must be a risk literal object", _line_of(text, role))
    keys = set(obj)
    if keys <= {"fuzzy", "random"}:
        fz = parse_fuzzy(obj["fuzzy"], text, role) if "fuzzy" in obj else None
        rv = parse_random(obj["random"], text, role) if "random" in obj else None
        return fz, rv
    kind, _ = _single_key(obj, f"{role} literal", text, role)
    if kind in FUZZY_KINDS:
        return parse_fuzzy(obj, text, role), None
    if kind in RANDOM_KINDS:
        return None, parse_random(obj, text, role)
    raise ScenarioError(f"unknown {role} literal {kind!r}", _line_of(text, kind))


def _parse_weighting(obj, text):
    if obj is None:
        return WeightingFunction.power(1)
    if obj == "uniform":
        return WeightingFunction.uniform()
    kind, val = _single_key(obj, "weighting", text, "weighting")
    if kind == "power":
        f = WeightingFunction.power(_number(val, "power exponent", text, "power"))
    elif kind == "uniform":
        f = WeightingFunction.uniform()
    elif kind == "polynomial":
        if not isinstance(val, list) or not val:
            raise ScenarioError("polynomial weighting needs a list of coefficients", _line_of(text, kind))
        f = WeightingFunction.polynomial([_number(c, "coefficient", text, kind) for c in val])
    else:
        raise ScenarioError(f"unknown weighting {kind!r}", _line_of(text, "weighting"))
    report = validate_weighting(f)
    if not report.valid:
        raise ScenarioError("invalid weighting: " + "; ".join(report.messages), _line_of(text, "weighting"))
    return f


def _parse_utility(obj, text):
    if obj is None:
        raise ScenarioError("scenario needs a utility", None)
    if obj == "log":
        return UtilityFunction.log()
    fam, val = _single_key(obj, "utility", text, "utility")
    try:
        if fam == "cara":
            return UtilityFunction.cara(_number(val, "cara coefficient", text, fam))
        if fam == "crra":
            return UtilityFunction.crra(_number(val, "crra coefficient", text, fam))
        if fam == "log":
            return UtilityFunction.log()
        if fam == "quadratic":
            return UtilityFunction.quadratic(_number(val, "quadratic coefficient", text, fam))
    except ScenarioError:
        raise
    except ValidationError as exc:
        raise ScenarioError(str(exc), _line_of(text, fam)) from None
    raise ScenarioError(f"unknown utility family {fam!r}", _line_of(text, "utility"))


def _parse_market(obj, text):
    if not isinstance(obj, dict) or "r" not in obj or not ({"w0", "w"} & set(obj)):
        raise ScenarioError("market needs r and one of w0, w", _line_of(text, "market"))
    r = _number(obj["r"], "r", text, "r")
    try:
        if "w0" in obj and "w" in obj:
            return MarketSpec(_number(obj["w0"], "w0", text, "w0"), r, _number(obj["w"], "w", text, "w"))
        if "w0" in obj:
            return MarketSpec.from_w0(_number(obj["w0"], "w0", text, "w0"), r)
        return MarketSpec.from_wealth(_number(obj["w"], "w", text, "w"), r)
    except ScenarioError:
        raise
    except ValidationError as exc:
        raise ScenarioError(str(exc), _line_of(text, "market")) from None


def _parse_sweep(obj, text):
    if obj is None:
        return None
    if not isinstance(obj, dict) or not set(obj) <= {"wealth", "risk_scale"}:
        raise ScenarioError("sweep accepts the keys wealth and risk_scale", _line_of(text, "sweep"))
    out = {}
    for key in ("wealth", "risk_scale"):
        if key in obj:
            if not isinstance(obj[key], list) or not obj[key]:
                raise ScenarioError(f"sweep {key} must be a non-empty list", _line_of(text, key))
            out[key] = tuple(_number(v, key, text, key) for v in obj[key])
    return Sweep(**out)


def scenario_from_dict(doc: dict, text: str | None = None, node_override: int | None = None) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object", 1)
    unknown = set(doc) - TOP_LEVEL_KEYS
    if unknown:
        key = sorted(unknown)[0]
        raise ScenarioError(f"unknown key {key!r}", _line_of(text, key))
    model = None
    if doc.get("model") is not None:
        try:
            model = ModelTag.parse(doc["model"])
        except ValidationError as exc:
            raise ScenarioError(str(exc), _line_of(text, "model")) from None
    quad = doc.get("quadrature") or {}
    if not isinstance(quad, dict) or not set(quad) <= {"nodes", "rule"}:
        raise ScenarioError("quadrature accepts the keys nodes and rule", _line_of(text, "quadrature"))
    qkw = {}
    if node_override is not None:
        qkw["node_count"] = node_override
    elif "nodes" in quad:
        qkw["node_count"] = quad["nodes"]
    if "rule" in quad:
        qkw["rule"] = quad["rule"]
    try:
        q = QuadratureConfig(**qkw)
    except (ValidationError, TypeError) as exc:
        raise ScenarioError(str(exc), _line_of(text, "quadrature")) from None

    inv_f, inv_r = _parse_risk(doc.get("investment"), "investment", text)
    if inv_f is None and inv_r is None:
        raise ScenarioError("scenario needs an investment risk", _line_of(text, "investment"))
    bg_f, bg_r = _parse_risk(doc.get("background"), "background", text)
    scenario = Scenario(
        model=model,
        market=_parse_market(doc.get("market"), text),
        utility=_parse_utility(doc.get("utility"), text),
        investment_fuzzy=inv_f,
        investment_random=inv_r,
        background_fuzzy=bg_f,
        background_random=bg_r,
        weighting=_parse_weighting(doc.get("weighting"), text),
        quadrature=q,
        sweep=_parse_sweep(doc.get("sweep"), text),
    )
    if model is not None:
        try:
            scenario.model_spec(model)
        except ScenarioError as exc:
            raise ScenarioError(str(exc), _line_of(text, "model")) from None
    return scenario


def parse_scenario(source, node_override: int | None = None) -> Scenario:
    """Parse a scenario from a path or from JSON text."""
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise ScenarioError(f"cannot read scenario: {exc}") from None
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc.msg} (column {exc.colno})", exc.lineno) from None
    return scenario_from_dict(doc, text, node_override)
