"""JSON schemas for every persistent object, with strict parsing."""

from __future__ import annotations

import json
import math
import re
from fractions import Fraction
from pathlib import Path

from .decoration import Decoration, LambdaAssignment
from .example import example_shear
from .farey import ExtRat, GeodesicEdge, Window
from .geometry import Horocycle, Mobius
from .shear import ShearFunction, ShearValue, VertexMap

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


class SchemaError(ValueError):
    """Input does not match the expected JSON schema."""


def _fail(msg: str):
    raise SchemaError(msg)


# --- scalars ----------------------------------------------------------------


def scalar_from_json(x):
    """``"a/b"``, integers and JSON ints stay exact; decimal strings and floats become floats."""
    if isinstance(x, bool):
        _fail(f"expected a number, got {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return x
    if not isinstance(x, str):
        _fail(f"expected a number or numeric string, got {x!r}")
    s = x.strip()
    if _RATIONAL.match(s):
        try:
            f = Fraction(s)
        except ZeroDivisionError:
            _fail(f"zero denominator in {x!r}")
        return f.numerator if f.denominator == 1 else f
    try:
        return float(s)
    except ValueError:
        _fail(f"not a number: {x!r}")


def scalar_to_json(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def extrat_from_json(x) -> ExtRat:
    if isinstance(x, int) and not isinstance(x, bool):
        return ExtRat(x)
    if not isinstance(x, str):
        _fail(f"expected a rational string, got {x!r}")
    try:
        return ExtRat.parse(x)
    except ValueError as exc:
        _fail(str(exc))


def edge_from_json(x) -> GeodesicEdge:
    if not isinstance(x, str):
        _fail(f"expected an edge string, got {x!r}")
    try:
        return GeodesicEdge.parse(x)
    except ValueError as exc:
        _fail(str(exc))


def window_from_json(x) -> Window:
    if not isinstance(x, dict):
        _fail("window must be an object")
    extra = set(x) - {"max_num", "max_den", "infinity"}
    if extra:
        _fail(f"unknown window keys {sorted(extra)}")
    try:
        N, D = x["max_num"], x["max_den"]
    except KeyError as exc:
        _fail(f"window is missing {exc.args[0]!r}")
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in (N, D)):
        _fail("window bounds must be integers")
    inf = x.get("infinity", True)
    if not isinstance(inf, bool):
        _fail("window 'infinity' must be a boolean")
    try:
        return Window(N, D, inf)
    except ValueError as exc:
        _fail(str(exc))


# --- geometry ---------------------------------------------------------------


def horocycle_from_json(x) -> Horocycle:
    if not isinstance(x, dict) or set(x) != {"base", "size"}:
        _fail("horocycle must be {'base', 'size'}")
    try:
        return Horocycle(extrat_from_json(x["base"]), scalar_from_json(x["size"]))
    except ValueError as exc:
        _fail(str(exc))


def mobius_from_json(x) -> Mobius:
    if not isinstance(x, dict) or set(x) != set("abcd"):
        _fail("Möbius map must be {'a', 'b', 'c', 'd'}")
    try:
        return Mobius(*(scalar_from_json(x[k]) for k in "abcd"))
    except ValueError as exc:
        _fail(str(exc))


# --- shears and vertex maps -------------------------------------------------

BUILTIN_RULES = {"zero": ShearFunction.zero, "paper-example": example_shear}


def _shear_value(entry: dict) -> ShearValue:
    if "mult" in entry and "log" in entry:
        _fail("entry has both 'log' and 'mult'")
    try:
        if "mult" in entry:
            m = scalar_from_json(entry["mult"])
            if isinstance(m, float):
                return ShearValue(math.log(m), None) if m > 0 else _fail("multiplier must be positive")
            return ShearValue.of_mult(m)
        if "log" in entry:
            return ShearValue.of_log(float(scalar_from_json(entry["log"])))
    except ValueError as exc:
        if isinstance(exc, SchemaError):
            raise
        _fail(str(exc))
    _fail("entry needs 'log' or 'mult'")


def shear_from_json(x) -> ShearFunction:
    if isinstance(x, str):
        x = {"rule": x}
    if not isinstance(x, dict):
        _fail("shear function must be an object or a builtin name")
    extra = set(x) - {"default", "entries", "rule"}
    if extra:
        _fail(f"unknown shear keys {sorted(extra)}")
    base = ShearFunction.zero()
    rule = x.get("rule")
    if rule is not None:
        if rule not in BUILTIN_RULES:
            _fail(f"unknown shear rule {rule!r}; builtins: {sorted(BUILTIN_RULES)}")
        base = BUILTIN_RULES[rule]()
    default = x.get("default", 0)
    d = scalar_from_json(default)
    default_val = ShearValue(0.0, 1) if d == 0 else ShearValue.of_log(float(d))
    entries = {}
    raw = x.get("entries", [])
    if not isinstance(raw, list):
        _fail("'entries' must be a list")
    for entry in raw:
        if not isinstance(entry, dict) or "edge" not in entry:
            _fail("each entry needs an 'edge'")
        if set(entry) - {"edge", "log", "mult"}:
            _fail(f"unknown entry keys {sorted(set(entry) - {'edge', 'log', 'mult'})}")
        e = edge_from_json(entry["edge"])
        if e in entries:
            _fail(f"duplicate entry for {e}")
        entries[e] = _shear_value(entry)
    try:
        return ShearFunction(entries, default=default_val, rule=base.rule, name=base.name, support=base.support)
    except ValueError as exc:
        _fail(str(exc))


def shear_to_json(s: ShearFunction) -> dict:
    out: dict = {"default": scalar_to_json(s.default.log) if s.default.log else 0}
    entries = []
    for e, v in sorted(s.entries.items()):
        if v.mult is not None:
            entries.append({"edge": str(e), "mult": str(v.mult)})
        else:
            entries.append({"edge": str(e), "log": repr(v.log)})
    out["entries"] = entries
    if s.rule is not None:
        out["rule"] = s.name
    return out


def vertex_map_from_json(x) -> VertexMap:
    if not isinstance(x, list):
        _fail("vertex map must be a list of [vertex, image] pairs")
    mapping = {}
    for pair in x:
        if not isinstance(pair, list) or len(pair) != 2:
            _fail("vertex map entries must be [vertex, image] pairs")
        k = extrat_from_json(pair[0])
        v = pair[1]
        if isinstance(v, str) and ("/" in v or _RATIONAL.match(v)):
            v = extrat_from_json(v)
        else:
            v = scalar_from_json(v)
        if k in mapping:
            _fail(f"vertex {k} mapped twice")
        mapping[k] = v
    return VertexMap.from_mapping(mapping)


# --- decorations ------------------------------------------------------------


def decoration_from_json(x) -> Decoration:
    if not isinstance(x, list):
        _fail("decoration must be a list")
    hs = []
    seen = set()
    for item in x:
        if not isinstance(item, dict) or set(item) != {"vertex", "size"}:
            _fail("decoration items must be {'vertex', 'size'}")
        v = extrat_from_json(item["vertex"])
        if v in seen:
            _fail(f"two horocycles at {v}")
        seen.add(v)
        try:
            hs.append(Horocycle(v, scalar_from_json(item["size"])))
        except ValueError as exc:
            if isinstance(exc, SchemaError):
                raise
            _fail(str(exc))
    return Decoration(hs)


def lambdas_from_json(x) -> LambdaAssignment:
    if not isinstance(x, list):
        _fail("lambda assignment must be a list")
    lams = LambdaAssignment()
    for item in x:
        if not isinstance(item, dict) or set(item) != {"edge", "lambda"}:
            _fail("lambda items must be {'edge', 'lambda'}")
        e = edge_from_json(item["edge"])
        if e in lams:
            _fail(f"two values for {e}")
        try:
            lams[e] = scalar_from_json(item["lambda"])
        except ValueError as exc:
            if isinstance(exc, SchemaError):
                raise
            _fail(str(exc))
    return lams


# --- triangulations ---------------------------------------------------------


def triangulation_from_json(x, base_dir: Path | None = None):
    from .triangulation import CrossingEdgesError, WindowTriangulation

    if not isinstance(x, dict) or set(x) != {"backend", "window"}:
        _fail("triangulation must be {'backend', 'window'}")
    w = window_from_json(x["window"])
    b = x["backend"]
    try:
        if b == "farey":
            return WindowTriangulation.farey(w)
        if isinstance(b, dict) and set(b) == {"diff"}:
            d = b["diff"]
            if not isinstance(d, dict) or set(d) != {"removed", "added"}:
                _fail("diff must be {'removed', 'added'}")
            if not isinstance(d["removed"], list) or not isinstance(d["added"], list):
                _fail("diff lists must be lists")
            return WindowTriangulation.from_diff(
                w, [edge_from_json(e) for e in d["removed"]], [edge_from_json(e) for e in d["added"]]
            )
        if isinstance(b, dict) and set(b) == {"image_of"}:
            ref = b["image_of"]
            if isinstance(ref, str):
                path = Path(ref) if base_dir is None else base_dir / ref
                try:
                    ref = json.loads(path.read_text())
                except (OSError, json.JSONDecodeError) as exc:
                    _fail(f"cannot read vertex map {ref!r}: {exc}")
            h = vertex_map_from_json(ref)
            if not h.exact:
                _fail("image_of needs an exact vertex map")
            h.window = w
            return WindowTriangulation.image_of(h, w)
    except CrossingEdgesError as exc:
        _fail(str(exc))
    except SchemaError:
        raise
    except ValueError as exc:
        _fail(str(exc))
    _fail("backend must be 'farey', {'diff': ...} or {'image_of': ...}")


def triangulation_to_json(T) -> dict:
    b = T.backend
    if b == "farey":
        backend = "farey"
    elif b[0] == "diff":
        backend = {"diff": {"removed": [str(e) for e in sorted(b[1])],
                            "added": [str(e) for e in sorted(b[2])]}}
    else:
        backend = {"image_of": b[1].to_json()}
    return {"backend": backend, "window": T.window.to_json()}


def flip_sequence_from_json(x) -> list:
    if not isinstance(x, list) or not all(isinstance(D, list) for D in x):
        _fail("flip sequence must be a list of edge lists")
    return [[edge_from_json(e) for e in D] for D in x]


def flip_sequence_to_json(seq) -> list:
    return [[str(e) for e in sorted(D)] for D in seq]


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
