"""Knowledge-base documents: JSON with a published schema and canonical output.

Canonical form: object keys sorted, arrays kept in declaration order, two
space indentation, numbers with at most nine fractional digits and no
trailing zeros.  ``load(save(kb)) == kb`` whenever every number in ``kb`` is
representable in that precision.
"""

from __future__ import annotations

import json
from typing import IO, Any, Union

import jsonschema

from .errors import FoodnetError, InvariantError, ParseError, SchemaError, ValidationError
from .expr import MethodDef, parse_expr, parse_guard, to_source
from .fuzzy import Type1FuzzySet, Type2FuzzySet
from .kb import Derivation, KnowledgeBase
from .model import (
    CrispScalar,
    CrispTuple,
    Fuzzy1,
    Fuzzy2,
    FuzzyClass,
    FuzzyObject,
    Heterogeneous,
    Homogeneous,
    Projection,
    Property,
    PropertyValue,
    Signature,
    Specification,
    TupleOfFuzzy,
    Verification,
)
from .modifiers import (
    Add,
    Concentrate,
    DependencyRule,
    Dilute,
    MapValues,
    Modifier,
    Remove,
    SetValue,
)
from .notation import fmt_number

FORMAT_VERSION = 1

_number = {"type": "number"}
_KINDS = ["crisp", "crisp_tuple", "fuzzy", "fuzzy2", "fuzzy_tuple"]

_VALUE_SCHEMA = {
    "type": "object",
    "if": {"required": ["verification"]},
    "then": {"additionalProperties": False, "properties": {"verification": _number}},
    "else": {"required": ["kind", "value"], "additionalProperties": False,
             "properties": {"kind": {"enum": _KINDS}, "value": {}, "unit": {"type": "string"}}},
}

_PROPERTY_SCHEMA = {
    "type": "object",
    "required": ["name"],
    "if": {"required": ["verification"]},
    "then": {"additionalProperties": False,
             "properties": {"name": {"type": "string", "minLength": 1}, "verification": _number}},
    "else": {"required": ["kind", "value"], "additionalProperties": False,
             "properties": {"name": {"type": "string", "minLength": 1}, "kind": {"enum": _KINDS},
                            "value": {}, "unit": {"type": "string"}}},
}

_METHOD_SCHEMA = {
    "type": "object",
    "required": ["name", "params", "body"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "params": {"type": "array", "items": {"type": "string"}},
        "body": {"type": "string"},
        "guard": {"type": ["string", "null"]},
        "kind": {"enum": ["exploiter", "modifier"]},
    },
}

_PART_SCHEMA = {
    "type": "object",
    "required": ["spec", "signature"],
    "properties": {
        "label": {"type": "string"},
        "spec": {"type": "array", "items": _PROPERTY_SCHEMA},
        "signature": {"type": "array", "items": _METHOD_SCHEMA},
    },
}

KB_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "fuzzy object-oriented knowledge base",
    "type": "object",
    "required": ["format_version"],
    "additionalProperties": False,
    "properties": {
        "format_version": {"const": FORMAT_VERSION},
        "classes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "kind"],
                "properties": {
                    "name": {"type": "string"},
                    "kind": {"enum": ["homogeneous", "heterogeneous"]},
                    "spec": {"type": "array", "items": _PROPERTY_SCHEMA},
                    "signature": {"type": "array", "items": _METHOD_SCHEMA},
                    "core": _PART_SCHEMA,
                    "projections": {"type": "array", "items": _PART_SCHEMA},
                },
            },
        },
        "objects": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "class", "spec"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string"},
                    "class": {"type": "string"},
                    "spec": {"type": "array", "items": _PROPERTY_SCHEMA},
                },
            },
        },
        "rules": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["dependent", "sources", "check"],
                "additionalProperties": False,
                "properties": {
                    "dependent": {"type": "string"},
                    "sources": {"type": "array", "items": {"type": "string"}},
                    "check": {"type": "string"},
                    "params": {"type": "object"},
                },
            },
        },
        "derivations": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["operation", "inputs", "output"],
                "additionalProperties": False,
                "properties": {
                    "operation": {"type": "string"},
                    "inputs": {"type": "array", "items": {"type": "string"}},
                    "output": {"type": "string"},
                },
            },
        },
    },
}

MODIFIER_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["kind", "actions"],
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": ["complete", "partial", "generating", "destroying", "replacing"]},
        "actions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["target", "action"],
                "properties": {
                    "target": {"type": "string"},
                    "action": {"enum": ["set", "add", "remove", "dilute", "concentrate", "map"]},
                    "value": _VALUE_SCHEMA,
                    "k": {"type": "integer", "minimum": 1},
                    "n": {"type": "integer", "minimum": 1},
                    "expr": {"type": "string"},
                },
            },
        },
    },
}

_KB_VALIDATOR = jsonschema.Draft202012Validator(KB_SCHEMA)
_MODIFIER_VALIDATOR = jsonschema.Draft202012Validator(MODIFIER_SCHEMA)


def _json_path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _check_schema(doc: Any, validator) -> None:
    if validator.is_valid(doc):
        return
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    err = jsonschema.exceptions.best_match(errors)
    raise SchemaError(err.message, _json_path(err.absolute_path))


# -- decoding ----------------------------------------------------------------

def _set1_from(doc) -> Type1FuzzySet:
    return Type1FuzzySet(tuple((e["value"], e["membership"]) for e in doc))


def _set2_from(doc) -> Type2FuzzySet:
    return Type2FuzzySet(tuple((e["value"], _set1_from(e["membership"])) for e in doc))


def _any_set_from(doc):
    if doc and isinstance(doc[0].get("membership"), list):
        return _set2_from(doc)
    return _set1_from(doc)


def value_from_doc(doc: dict, path: str = "$") -> PropertyValue:
    """Decode a property value; raises ``ValidationError`` with ``path`` on bad content."""
    try:
        if "verification" in doc:
            return Verification(doc["verification"])
        kind, raw, unit = doc["kind"], doc["value"], doc.get("unit", "")
        if kind == "crisp":
            return CrispScalar(raw, unit)
        if kind == "crisp_tuple":
            return CrispTuple(tuple(raw), unit)
        if kind == "fuzzy":
            return Fuzzy1(_set1_from(raw), unit)
        if kind == "fuzzy2":
            return Fuzzy2(_set2_from(raw), unit)
        return TupleOfFuzzy(tuple(_any_set_from(c) for c in raw), unit)
    except (InvariantError, KeyError, TypeError, AttributeError, IndexError) as exc:
        raise ValidationError(f"bad property value: {exc}", path) from exc


def _spec_from(doc: list, path: str) -> Specification:
    props = []
    for i, p in enumerate(doc):
        rest = {k: v for k, v in p.items() if k != "name"}
        props.append(Property(p["name"], value_from_doc(rest, f"{path}[{i}]")))
    try:
        return Specification(tuple(props))
    except InvariantError as exc:
        raise ValidationError(str(exc), path) from exc


def _method_from(doc: dict, path: str) -> MethodDef:
    try:
        body = parse_expr(doc["body"])
        guard = parse_guard(doc["guard"]) if doc.get("guard") else None
    except ParseError as exc:
        exc.args = (f"{path}: {exc}",)
        raise
    try:
        return MethodDef(doc["name"], tuple(doc["params"]), body, guard, doc.get("kind", "exploiter"))
    except InvariantError as exc:
        raise ValidationError(str(exc), path) from exc


def _sig_from(doc: list, path: str) -> Signature:
    meths = [_method_from(m, f"{path}[{i}]") for i, m in enumerate(doc)]
    try:
        return Signature(tuple(meths))
    except InvariantError as exc:
        raise ValidationError(str(exc), path) from exc


def _class_from(doc: dict, path: str) -> FuzzyClass:
    try:
        if doc["kind"] == "homogeneous":
            body = Homogeneous(_spec_from(doc.get("spec", []), f"{path}.spec"),
                               _sig_from(doc.get("signature", []), f"{path}.signature"))
        else:
            core = doc.get("core", {"spec": [], "signature": []})
            body = Heterogeneous(
                _spec_from(core["spec"], f"{path}.core.spec"),
                _sig_from(core["signature"], f"{path}.core.signature"),
                tuple(Projection(p.get("label", ""),
                                 _spec_from(p["spec"], f"{path}.projections[{i}].spec"),
                                 _sig_from(p["signature"], f"{path}.projections[{i}].signature"))
                      for i, p in enumerate(doc.get("projections", []))))
        return FuzzyClass(doc["name"], body)
    except InvariantError as exc:
        raise ValidationError(str(exc), path) from exc


def _rule_from(doc: dict, path: str) -> DependencyRule:
    try:
        return DependencyRule(doc["dependent"], tuple(doc["sources"]), doc["check"],
                              dict(doc.get("params", {})))
    except InvariantError as exc:
        raise ValidationError(str(exc), path) from exc


def from_document(doc: Any) -> KnowledgeBase:
    _check_schema(doc, _KB_VALIDATOR)
    kb = KnowledgeBase()
    for i, c in enumerate(doc.get("classes", [])):
        cls = _class_from(c, f"$.classes[{i}]")
        if cls.name in kb.classes:
            raise ValidationError(f"duplicate class name {cls.name!r}", f"$.classes[{i}].name")
        kb.add_class(cls)
    for i, o in enumerate(doc.get("objects", [])):
        path = f"$.objects[{i}]"
        try:
            obj = FuzzyObject(o["id"], o["class"], _spec_from(o["spec"], f"{path}.spec"))
        except InvariantError as exc:
            raise ValidationError(str(exc), path) from exc
        if obj.id in kb.objects:
            raise ValidationError(f"duplicate object id {obj.id!r}", f"{path}.id")
        kb.add_object(obj)
    kb.rules.extend(_rule_from(r, f"$.rules[{i}]") for i, r in enumerate(doc.get("rules", [])))
    kb.derivations.extend(Derivation(d["operation"], tuple(d["inputs"]), d["output"])
                          for d in doc.get("derivations", []))
    kb.validate()
    return kb


# -- encoding ----------------------------------------------------------------

def _set_doc(s) -> list:
    if isinstance(s, Type2FuzzySet):
        return [{"value": v, "membership": _set_doc(g)} for v, g in s]
    return [{"value": v, "membership": mu} for v, mu in s]


def value_to_doc(value: PropertyValue) -> dict:
    if isinstance(value, Verification):
        return {"verification": value.value}
    if isinstance(value, CrispScalar):
        raw = value.value
    elif isinstance(value, CrispTuple):
        raw = list(value.values)
    elif isinstance(value, (Fuzzy1, Fuzzy2)):
        raw = _set_doc(value.set)
    else:
        raw = [_set_doc(c) for c in value.components]
    return {"kind": value.kind, "value": raw, "unit": value.unit}


def spec_to_doc(s: Specification) -> list:
    return [{"name": p.name, **value_to_doc(p.value)} for p in s]


def method_to_doc(m: MethodDef) -> dict:
    return {"name": m.name, "params": list(m.params), "body": to_source(m.body),
            "guard": str(m.guard) if m.guard else None, "kind": m.kind}


def sig_to_doc(g: Signature) -> list:
    return [method_to_doc(m) for m in g]


def class_to_doc(cls: FuzzyClass) -> dict:
    if isinstance(cls.body, Homogeneous):
        return {"name": cls.name, "kind": "homogeneous",
                "spec": spec_to_doc(cls.body.spec), "signature": sig_to_doc(cls.body.sig)}
    return {
        "name": cls.name,
        "kind": "heterogeneous",
        "core": {"spec": spec_to_doc(cls.body.core_spec), "signature": sig_to_doc(cls.body.core_sig)},
        "projections": [{"label": p.label, "spec": spec_to_doc(p.spec), "signature": sig_to_doc(p.sig)}
                        for p in cls.body.projections],
    }


def object_to_doc(obj: FuzzyObject) -> dict:
    return {"id": obj.id, "class": obj.class_name, "spec": spec_to_doc(obj.spec)}


def rule_to_doc(rule: DependencyRule) -> dict:
    doc = {"dependent": rule.dependent, "sources": list(rule.sources), "check": rule.check}
    if rule.params:
        doc["params"] = dict(rule.params)
    return doc


def to_document(kb: KnowledgeBase) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "classes": [class_to_doc(c) for c in kb.classes.values()],
        "objects": [object_to_doc(o) for o in kb.objects.values()],
        "rules": [rule_to_doc(r) for r in kb.rules],
        "derivations": [{"operation": d.operation, "inputs": list(d.inputs), "output": d.output}
                        for d in kb.derivations],
    }


def canonical_json(doc: Any, indent: int = 0) -> str:
    """Deterministic JSON text with the package's number formatting."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if doc is None or isinstance(doc, bool):
        return json.dumps(doc)
    if isinstance(doc, (int, float)):
        return fmt_number(float(doc))
    if isinstance(doc, str):
        return json.dumps(doc, ensure_ascii=False)
    if isinstance(doc, dict):
        if not doc:
            return "{}"
        items = [f"{inner}{json.dumps(str(k), ensure_ascii=False)}: {canonical_json(doc[k], indent + 1)}"
                 for k in sorted(doc)]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(doc, (list, tuple)):
        if not doc:
            return "[]"
        if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in doc):
            return "[" + ", ".join(fmt_number(float(x)) for x in doc) + "]"
        return "[\n" + ",\n".join(f"{inner}{canonical_json(x, indent + 1)}" for x in doc) + f"\n{pad}]"
    raise TypeError(f"cannot serialize {type(doc).__name__}")


def save(kb: KnowledgeBase) -> bytes:
    return (canonical_json(to_document(kb)) + "\n").encode("utf-8")


Source = Union[bytes, str, IO]


def _read_json(source: Source) -> Any:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        return json.loads(source)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from exc


def load(source: Source) -> KnowledgeBase:
    """Parse and fully validate a knowledge-base document."""
    return from_document(_read_json(source))


def load_path(path) -> KnowledgeBase:
    with open(path, "rb") as fh:
        return load(fh)


def save_path(kb: KnowledgeBase, path) -> None:
    data = save(kb)
    with open(path, "wb") as fh:
        fh.write(data)


# -- modifier documents ------------------------------------------------------

def modifier_from_document(doc: Any) -> Modifier:
    _check_schema(doc, _MODIFIER_VALIDATOR)
    actions = []
    for i, a in enumerate(doc["actions"]):
        path = f"$.actions[{i}]"
        kind = a["action"]
        try:
            if kind in ("set", "add"):
                if "value" not in a:
                    raise SchemaError("'value' is required", path)
                value = value_from_doc(a["value"], f"{path}.value")
                action = SetValue(value) if kind == "set" else Add(value)
            elif kind == "remove":
                action = Remove()
            elif kind == "dilute":
                action = Dilute(a["k"])
            elif kind == "concentrate":
                action = Concentrate(a["n"])
            else:
                action = MapValues(parse_expr(a["expr"]))
        except KeyError as exc:
            raise SchemaError(f"{exc.args[0]!r} is required for {kind}", path) from exc
        except InvariantError as exc:
            raise ValidationError(str(exc), path) from exc
        actions.append((a["target"], action))
    try:
        return Modifier(doc["kind"], tuple(actions))
    except InvariantError as exc:
        raise ValidationError(str(exc), "$.actions") from exc


def modifier_to_document(m: Modifier) -> dict:
    actions = []
    for target, a in m.actions:
        entry: dict[str, Any] = {"target": target}
        if isinstance(a, SetValue):
            entry.update(action="set", value=value_to_doc(a.value))
        elif isinstance(a, Add):
            entry.update(action="add", value=value_to_doc(a.value))
        elif isinstance(a, Remove):
            entry.update(action="remove")
        elif isinstance(a, Dilute):
            entry.update(action="dilute", k=a.k)
        elif isinstance(a, Concentrate):
            entry.update(action="concentrate", n=a.n)
        else:
            entry.update(action="map", expr=to_source(a.body))
        actions.append(entry)
    return {"kind": m.kind, "actions": actions}


def load_modifier(source: Source) -> Modifier:
    return modifier_from_document(_read_json(source))


__all__ = [
    "FORMAT_VERSION", "KB_SCHEMA", "MODIFIER_SCHEMA", "FoodnetError",
    "load", "load_path", "save", "save_path", "from_document", "to_document",
    "canonical_json", "value_from_doc", "value_to_doc", "load_modifier",
    "modifier_from_document", "modifier_to_document",
]
