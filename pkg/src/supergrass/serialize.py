"""Canonical JSON interchange for every value type, and scenario parsing."""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import jsonschema

from .algebra import DimensionMismatch, EvenMatrix, GrassmannElement, indices_from_mask, mask_from_indices
from .cartan import IntegralForm, PseudoForm, VectorField
from .gravity import Connection, CurvatureTensor
from .maxwell import Potential
from .riemann import CovariantTwoTensor, InvalidMetric, Metric, metric_validate


class ScenarioError(ValueError):
    """Input rejected; ``path`` names the offending key."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.reason = message


RATIONAL = r"^-?[0-9]+(/[0-9]+)?$"
_RATIONAL_RE = re.compile(RATIONAL)

_ELEMENT = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["xi", "c"],
        "additionalProperties": False,
        "properties": {
            "xi": {"type": "array", "items": {"type": "integer", "minimum": 1}},
            "c": {"type": "string", "pattern": RATIONAL},
        },
    },
}

SCENARIO_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "supergrass scenario",
    "type": "object",
    "required": ["dimension"],
    "additionalProperties": False,
    "$defs": {
        "element": _ELEMENT,
        "rational": {"type": "string", "pattern": RATIONAL},
        "metric": {
            "type": "object",
            "required": ["dim", "entries"],
            "additionalProperties": False,
            "properties": {
                "dim": {"type": "integer", "minimum": 2},
                "orientation": {"enum": [1, -1]},
                "entries": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["row", "col", "value"],
                        "additionalProperties": False,
                        "properties": {
                            "row": {"type": "integer", "minimum": 1},
                            "col": {"type": "integer", "minimum": 1},
                            "value": {"$ref": "#/$defs/element"},
                        },
                    },
                },
            },
        },
        "oneform": {"type": "array", "items": {"$ref": "#/$defs/element"}},
        "connection": {
            "type": "object",
            "required": ["entries"],
            "additionalProperties": False,
            "properties": {
                "entries": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["index", "value"],
                        "additionalProperties": False,
                        "properties": {
                            "index": {
                                "type": "array",
                                "items": {"type": "integer", "minimum": 1},
                                "minItems": 3,
                                "maxItems": 3,
                            },
                            "value": {"$ref": "#/$defs/element"},
                        },
                    },
                }
            },
        },
    },
    "properties": {
        "dimension": {"type": "integer", "minimum": 1, "maximum": 8},
        "metric": {"$ref": "#/$defs/metric"},
        "potential": {"$ref": "#/$defs/oneform"},
        "current": {"$ref": "#/$defs/oneform"},
        "connection": {"$ref": "#/$defs/connection"},
        "seed": {"type": "integer"},
        "options": {"type": "object"},
    },
}


# values -> JSON --------------------------------------------------------------------


def rational_to_json(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def rational_from_json(s: Any, path: str = "$") -> Fraction:
    if not isinstance(s, str) or not _RATIONAL_RE.match(s):
        raise ScenarioError(f"expected a rational string 'p/q', got {s!r}", path)
    q = s.split("/")
    if len(q) == 2 and int(q[1]) == 0:
        raise ScenarioError("zero denominator", path)
    return Fraction(s)


def _mask_key(mask: int):
    return (mask.bit_count(), indices_from_mask(mask))


def element_to_json(a: GrassmannElement) -> list:
    return [{"xi": indices_from_mask(m), "c": rational_to_json(c)} for m, c in sorted(a.terms.items(), key=lambda t: _mask_key(t[0]))]


def element_from_json(data: Any, dim: int, path: str = "$") -> GrassmannElement:
    if not isinstance(data, list):
        raise ScenarioError("expected an array of terms", path)
    terms: dict[int, Fraction] = {}
    for i, t in enumerate(data):
        p = f"{path}[{i}]"
        if not isinstance(t, dict) or set(t) != {"xi", "c"}:
            raise ScenarioError("term must have exactly the keys 'xi' and 'c'", p)
        xi = t["xi"]
        if not isinstance(xi, list) or not all(isinstance(k, int) and not isinstance(k, bool) for k in xi):
            raise ScenarioError("'xi' must be an array of integers", p + ".xi")
        if any(k < 1 or k > dim for k in xi):
            raise ScenarioError(f"generator index outside 1..{dim}", p + ".xi")
        if any(a >= b for a, b in zip(xi, xi[1:])):
            raise ScenarioError("'xi' must be strictly increasing", p + ".xi")
        m = mask_from_indices(xi)
        if m in terms:
            raise ScenarioError(f"duplicate monomial {xi}", p)
        terms[m] = rational_from_json(t["c"], p + ".c")
    return GrassmannElement(dim, terms)


def matrix_to_json(m: EvenMatrix) -> list:
    return [
        {"row": r + 1, "col": c + 1, "value": element_to_json(m[r, c])}
        for r in range(m.size)
        for c in range(m.size)
        if m[r, c]
    ]


def form_to_json(f: PseudoForm | IntegralForm) -> list:
    key = "ddelta" if isinstance(f, IntegralForm) else "y"
    terms = sorted(f.terms.items(), key=lambda t: (t[0][0], _mask_key(t[0][1])))
    return [{key: list(e), "xi": indices_from_mask(m), "c": rational_to_json(c)} for (e, m), c in terms]


def form_from_json(data: Any, n: int, kind=PseudoForm, path: str = "$"):
    key = "ddelta" if kind is IntegralForm else "y"
    if not isinstance(data, list):
        raise ScenarioError("expected an array of terms", path)
    out = {}
    for i, t in enumerate(data):
        p = f"{path}[{i}]"
        if not isinstance(t, dict) or set(t) != {key, "xi", "c"}:
            raise ScenarioError(f"term must have exactly the keys '{key}', 'xi', 'c'", p)
        e = t[key]
        if not isinstance(e, list) or len(e) != n or any(not isinstance(x, int) or x < 0 for x in e):
            raise ScenarioError(f"'{key}' must be {n} non-negative integers", p)
        el = element_from_json([{"xi": t["xi"], "c": t["c"]}], n, p)
        for m, c in el.terms.items():
            k = (tuple(e), m)
            if k in out:
                raise ScenarioError("duplicate term", p)
            out[k] = c
    return kind(n, out)


def field_to_json(V: VectorField) -> dict:
    return {"parity": V.parity, "components": [element_to_json(c) for c in V.components]}


def field_from_json(data: Any, n: int, path: str = "$") -> VectorField:
    if not isinstance(data, dict) or data.get("parity") not in (0, 1) or not isinstance(data.get("components"), list):
        raise ScenarioError("vector field needs 'parity' 0|1 and 'components'", path)
    comps = [element_from_json(c, n, f"{path}.components[{i}]") for i, c in enumerate(data["components"])]
    if len(comps) != n:
        raise ScenarioError(f"expected {n} components", path + ".components")
    return VectorField(data["parity"], comps, n)


def metric_to_json(g: Metric) -> dict:
    entries = [
        {"row": r, "col": c, "value": element_to_json(v)}
        for (r, c), v in sorted(g.upper().items())
        if v
    ]
    return {"dim": g.dim, "orientation": g.orientation, "entries": entries}


def metric_from_json(data: Any, dim: int, path: str = "$.metric") -> Metric:
    if not isinstance(data, dict):
        raise ScenarioError("metric must be an object", path)
    if data.get("dim") != dim:
        raise ScenarioError(f"metric dim {data.get('dim')} does not match dimension {dim}", path + ".dim")
    upper = {}
    for i, e in enumerate(data.get("entries", [])):
        p = f"{path}.entries[{i}]"
        r, c = e["row"], e["col"]
        if r == c:
            raise ScenarioError("diagonal entry given; the metric is antisymmetric", p)
        if not (1 <= r < c <= dim):
            raise ScenarioError(f"entries must satisfy 1 <= row < col <= {dim}", p)
        if (r, c) in upper:
            raise ScenarioError(f"duplicate entry ({r},{c})", p)
        upper[(r, c)] = element_from_json(e["value"], dim, p + ".value")
    try:
        g = Metric.from_upper(dim, upper, orientation=data.get("orientation", 1))
    except InvalidMetric as exc:
        raise ScenarioError(str(exc), path) from exc
    rep = metric_validate(g)
    if not rep.ok:
        raise ScenarioError("invalid metric: " + "; ".join(rep.violations), path)
    return g


def potential_to_json(A: Potential) -> list:
    return [element_to_json(c) for c in A.components]


def potential_from_json(data: Any, dim: int, path: str) -> Potential:
    if not isinstance(data, list) or len(data) != dim:
        raise ScenarioError(f"expected {dim} components", path)
    comps = [element_from_json(c, dim, f"{path}[{i}]") for i, c in enumerate(data)]
    for i, c in enumerate(comps):
        if not c.is_odd():
            raise ScenarioError("component must be odd", f"{path}[{i}]")
    return Potential(tuple(comps))


def connection_to_json(C: Connection) -> dict:
    n = C.n
    entries = [
        {"index": [c + 1, a + 1, b + 1], "value": element_to_json(C.gamma[c][a][b])}
        for c in range(n)
        for a in range(n)
        for b in range(n)
        if C.gamma[c][a][b]
    ]
    return {"entries": entries}


def connection_from_json(data: Any, dim: int, path: str = "$.connection") -> Connection:
    table = {}
    for i, e in enumerate(data.get("entries", [])):
        p = f"{path}.entries[{i}]"
        idx = tuple(e["index"])
        if any(k > dim for k in idx):
            raise ScenarioError(f"index outside 1..{dim}", p + ".index")
        if idx in table:
            raise ScenarioError(f"duplicate index {list(idx)}", p)
        v = element_from_json(e["value"], dim, p + ".value")
        if not v.is_odd():
            raise ScenarioError("Christoffel symbols must be odd", p + ".value")
        table[idx] = v
    z = GrassmannElement.zero(dim)
    return Connection.from_function(dim, lambda c, a, b: table.get((c + 1, a + 1, b + 1), z))


def curvature_to_json(R: CurvatureTensor) -> list:
    n = R.n
    return [
        {"index": [a + 1, b + 1, m + 1, v + 1], "value": element_to_json(R(a, b, m, v))}
        for a in range(n)
        for b in range(n)
        for m in range(n)
        for v in range(n)
        if R(a, b, m, v)
    ]


def tensor_to_json(T: CovariantTwoTensor) -> list:
    n = T.dim
    return [{"row": r + 1, "col": c + 1, "value": element_to_json(T[r, c])} for r in range(n) for c in range(n) if T[r, c]]


# scenarios ----------------------------------------------------------------------------


@dataclass
class Scenario:
    dimension: int
    metric: Metric | None = None
    potential: Potential | None = None
    current: Potential | None = None
    connection: Connection | None = None
    seed: int | None = None
    options: dict = field(default_factory=dict)

    def require(self, name: str):
        val = getattr(self, name)
        if val is None:
            raise ScenarioError(f"this command needs a '{name}' in the scenario", f"$.{name}")
        return val


def _schema_path(err: jsonschema.ValidationError) -> str:
    p = "$"
    for part in err.absolute_path:
        p += f"[{part}]" if isinstance(part, int) else f".{part}"
    return p


def scenario_from_data(data: Any) -> Scenario:
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        raise ScenarioError(errors[0].message, _schema_path(errors[0]))
    dim = data["dimension"]
    sc = Scenario(dim, seed=data.get("seed"), options=dict(data.get("options", {})))
    if "metric" in data:
        sc.metric = metric_from_json(data["metric"], dim)
    for key in ("potential", "current"):
        if key in data:
            setattr(sc, key, potential_from_json(data[key], dim, f"$.{key}"))
    if "connection" in data:
        sc.connection = connection_from_json(data["connection"], dim)
    return sc


def parse_scenario(source) -> Scenario:
    """Parse a scenario from a path, a file object or a JSON string."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        s = str(source)
        if s.lstrip().startswith("{"):
            text = s
        else:
            try:
                with open(s, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ScenarioError(f"cannot read input: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"malformed JSON: {exc.msg} (line {exc.lineno})") from exc
    return scenario_from_data(data)


def scenario_to_json(sc: Scenario) -> dict:
    out: dict = {"dimension": sc.dimension}
    if sc.metric is not None:
        out["metric"] = metric_to_json(sc.metric)
    if sc.potential is not None:
        out["potential"] = potential_to_json(sc.potential)
    if sc.current is not None:
        out["current"] = potential_to_json(sc.current)
    if sc.connection is not None:
        out["connection"] = connection_to_json(sc.connection)
    if sc.seed is not None:
        out["seed"] = sc.seed
    if sc.options:
        out["options"] = sc.options
    return out


def canonical_dumps(obj: Any, indent: int | None = 2) -> str:
    return json.dumps(obj, sort_keys=True, indent=indent, ensure_ascii=True) + ("\n" if indent is not None else "")


def digest(obj: Any) -> str:
    return "sha256:" + hashlib.sha256(canonical_dumps(obj, None).encode()).hexdigest()


def check_dimension(sc: Scenario) -> None:
    for name in ("metric", "potential", "current", "connection"):
        v = getattr(sc, name)
        if v is None:
            continue
        d = v.dim if hasattr(v, "dim") else v.n
        if d != sc.dimension:
            raise DimensionMismatch(f"{name} has dimension {d}, scenario says {sc.dimension}")
