"""Command-line front end over knowledge-base files.

Exit codes: 0 success, 1 domain error (including consistency violations),
2 usage or format error.  ``--machine`` switches reports to canonical JSON.
The input knowledge base is never rewritten; updated bases go to ``--out``.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from typing import Any, Sequence

from . import algebra, modifiers, persistence
from .errors import DomainError, FormatError, InvariantError, UnknownProperty
from .evaluate import evaluate
from .kb import KnowledgeBase
from .model import (
    CrispScalar,
    CrispTuple,
    Fuzzy1,
    Fuzzy2,
    FuzzyClass,
    Heterogeneous,
    Signature,
    Specification,
    TupleOfFuzzy,
)
from .notation import parse_fuzzy_literal, render_value

OPS = ("union", "intersect", "diff", "symdiff", "clone")


class UsageError(Exception):
    pass


def _count(n: int, word: str, plural: str | None = None) -> str:
    return f"{n} {word if n == 1 else plural or word + 's'}"


def _part_lines(title: str, s: Specification, g: Signature) -> list[str]:
    lines = [f"  {title}: {_count(len(s), 'property', 'properties')}, {_count(len(g), 'method')}"]
    lines += [f"    {p}" for p in s]
    lines += [f"    {m}" for m in g]
    return lines


def render_class(cls: FuzzyClass) -> str:
    if not isinstance(cls.body, Heterogeneous):
        return "\n".join([f"class {cls.name} (homogeneous)"]
                         + _part_lines("members", cls.body.spec, cls.body.sig))
    lines = [f"class {cls.name} (heterogeneous)"]
    lines += _part_lines("core", cls.body.core_spec, cls.body.core_sig)
    for p in cls.body.projections:
        lines += _part_lines(f"projection {p.label}", p.spec, p.sig)
    return "\n".join(lines)


def _emit(args, human: str, machine: dict) -> None:
    if args.machine:
        print(persistence.canonical_json(machine))
    else:
        print(human)


def _load(path: str) -> KnowledgeBase:
    try:
        return persistence.load_path(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _write(args, kb: KnowledgeBase) -> None:
    if args.out:
        persistence.save_path(kb, args.out)


# -- commands ----------------------------------------------------------------

def cmd_validate(args) -> int:
    kb = _load(args.kb)
    found = []
    for obj in kb.objects.values():
        for v in modifiers.check_consistency(obj, kb.rules):
            found.append((obj.id, v))
    summary = (f"{_count(len(kb.classes), 'class', 'classes')}, "
               f"{_count(len(kb.objects), 'object')}, {_count(len(found), 'violation')}")
    human = "\n".join([summary] + [f"  {oid}: {v}" for oid, v in found])
    machine = {
        "command": "validate",
        "classes": len(kb.classes),
        "objects": len(kb.objects),
        "violations": [{"object": oid, "rule": str(v.rule), "dependent": v.dependent,
                        "observed": v.observed, "required": v.required} for oid, v in found],
    }
    _emit(args, human, machine)
    return 1 if found else 0


def cmd_op(args) -> int:
    kb = _load(args.kb)
    op, ids = args.operation, args.args
    if op == "clone":
        if len(ids) != 2 or not ids[1].isdigit() or int(ids[1]) < 1:
            raise UsageError("clone takes an object id and a positive copy index")
        obj = algebra.clone(kb.object(ids[0]), int(ids[1]), kb)
        _write(args, kb)
        _emit(args, f"new object {obj.id} of class {obj.class_name}",
              {"command": "op", "operation": op, "object": persistence.object_to_doc(obj)})
        return 0
    if (op == "union" and len(ids) < 2) or (op != "union" and len(ids) != 2):
        raise UsageError(f"{op} takes {'at least ' if op == 'union' else ''}two object ids")
    objs = [kb.object(i) for i in ids]
    machine: dict[str, Any] = {"command": "op", "operation": op}
    if op == "union":
        members, cls = algebra.union_all(objs, kb)
        extra = f"\nset {{{', '.join(members.ids)}}} typed by {cls.name}"
        machine["set"] = {"members": list(members.ids), "class": cls.name}
    else:
        fn = {"intersect": algebra.intersection, "diff": algebra.difference,
              "symdiff": algebra.symmetric_difference}[op]
        cls, extra = fn(objs[0], objs[1], kb), ""
    machine["class"] = persistence.class_to_doc(cls)
    _write(args, kb)
    _emit(args, render_class(cls) + extra, machine)
    return 0


_PROP_REF = re.compile(r"([^\[\]=\s]+)(?:\[(\d+)\])?$")


def _binding_value(text: str, subject):
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass
    if text.startswith("{"):
        try:
            return parse_fuzzy_literal(text)
        except InvariantError as exc:
            raise UsageError(f"bad fuzzy literal {text!r}: {exc}") from exc
    m = _PROP_REF.match(text)
    if not m:
        raise UsageError(f"cannot read binding value {text!r}")
    value = subject.spec.value(m.group(1))
    if m.group(2) is None:
        return value
    idx = int(m.group(2))
    if isinstance(value, CrispTuple) and idx < len(value.values):
        return CrispScalar(value.values[idx], value.unit)
    if isinstance(value, TupleOfFuzzy) and idx < len(value.components):
        comp = value.components[idx]
        return (Fuzzy2 if value.order == 2 else Fuzzy1)(comp, value.unit)
    raise UsageError(f"{text!r} does not name a tuple component")


def _find_method(kb: KnowledgeBase, subject, name: str):
    """The subject's method, or the one it lost through modification.

    A method dropped by a modifier is still looked up in the ancestors'
    classes so that evaluating it reports why it became undefined.
    """
    for oid in [subject.id] + kb.lineage(subject.id):
        obj = kb.objects.get(oid)
        if obj is None or obj.class_name not in kb.classes:
            continue
        sig = kb.classes[obj.class_name].shape(obj.id)[1]
        if name in sig:
            return sig.get(name)
    raise UnknownProperty(f"class {subject.class_name} has no method {name!r}")


def cmd_eval(args) -> int:
    kb = _load(args.kb)
    subject = kb.object(args.object)
    meth = _find_method(kb, subject, args.method)
    bindings = {}
    for item in args.bind:
        name, sep, raw = item.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"binding {item!r} is not name=value")
        bindings[name.strip()] = _binding_value(raw, subject)
    result = evaluate(meth, subject, bindings)
    _emit(args, render_value(result),
          {"command": "eval", "object": subject.id, "method": args.method,
           "result": persistence.value_to_doc(result)})
    return 0


def cmd_modify(args) -> int:
    kb = _load(args.kb)
    try:
        with open(args.modifier, "rb") as fh:
            m = persistence.load_modifier(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {args.modifier}: {exc.strerror or exc}") from exc
    res = modifiers.apply_modifier(kb.object(args.object), m, kb, mode=args.mode)
    _write(args, kb)
    lines = [f"successor: {res.obj.id}",
             f"dropped: {', '.join(res.dropped) if res.dropped else 'none'}",
             f"generated class: {res.cls.name}" if res.generated else f"class: {res.cls.name} (unchanged)"]
    lines += [f"  {p}" for p in res.obj.spec]
    _emit(args, "\n".join(lines), {
        "command": "modify",
        "successor": persistence.object_to_doc(res.obj),
        "dropped": list(res.dropped),
        "generated": res.generated,
        "class": persistence.class_to_doc(res.cls),
    })
    return 0


def cmd_schema(args) -> int:
    schema = persistence.KB_SCHEMA if args.which == "kb" else persistence.MODIFIER_SCHEMA
    print(json.dumps(schema, indent=2, sort_keys=True))
    return 0


# -- wiring ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kb", required=True, help="knowledge-base file to read")
    common.add_argument("--machine", action="store_true", help="print canonical JSON")
    writes = argparse.ArgumentParser(add_help=False)
    writes.add_argument("--out", help="write the updated knowledge base here")

    parser = argparse.ArgumentParser(prog="foodnet", description="Fuzzy object-oriented knowledge bases.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="load a knowledge base and check its rules")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("op", parents=[common, writes], help="class algebra over objects")
    p.add_argument("operation", choices=OPS)
    p.add_argument("args", nargs="+", help="object ids (clone: id and copy index)")
    p.set_defaults(func=cmd_op)

    p = sub.add_parser("eval", parents=[common], help="evaluate a method on an object")
    p.add_argument("object")
    p.add_argument("method")
    p.add_argument("--bind", action="append", default=[], metavar="NAME=VALUE",
                   help="number, {v/mu + ...}[, unit] literal, or property[index] of the object")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("modify", parents=[common, writes], help="apply a modifier file to an object")
    p.add_argument("object")
    p.add_argument("--modifier", required=True, help="modifier document (JSON)")
    p.add_argument("--mode", choices=modifiers.MODES, default="strict")
    p.set_defaults(func=cmd_modify)

    p = sub.add_parser("schema", help="print a published JSON schema")
    p.add_argument("which", choices=("kb", "modifier"), nargs="?", default="kb")
    p.add_argument("--machine", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_schema)
    return parser


def _fail(args, code: int, kind: str, message: str) -> int:
    if getattr(args, "machine", False):
        print(persistence.canonical_json({"error": kind, "message": message, "exit": code}))
    else:
        print(f"error ({kind}): {message}", file=sys.stderr)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out, kb_path = getattr(args, "out", None), getattr(args, "kb", None)
    if out and kb_path and os.path.abspath(out) == os.path.abspath(kb_path):
        return _fail(args, 2, "UsageError", "--out must differ from --kb; inputs are never rewritten")
    try:
        return args.func(args)
    except (UsageError, FormatError) as exc:
        return _fail(args, 2, type(exc).__name__, str(exc))
    except DomainError as exc:
        return _fail(args, 1, type(exc).__name__, str(exc))


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
