"""Union, intersection, difference, symmetric difference and cloning.

Every operation reads its argument objects without changing them.  Classes
the operations generate are registered in the knowledge base together with a
derivation record, under names of the form ``<op>(<class>,<class>)#<n>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DuplicateId, EmptyCore, EmptyResult, IdCollision
from .expr import alpha_equivalent
from .kb import KnowledgeBase
from .model import (
    FuzzyClass,
    FuzzyObject,
    Heterogeneous,
    Homogeneous,
    Projection,
    Signature,
    Specification,
    eq_property,
)

Part = tuple[str, Specification, Signature]


@dataclass(frozen=True)
class ObjectSet:
    members: tuple[FuzzyObject, ...]
    class_name: str

    def __post_init__(self):
        ids = [m.id for m in self.members]
        if len(set(ids)) != len(ids):
            raise DuplicateId("object set members must have distinct ids")

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(m.id for m in self.members)


def core_and_projections(parts: Sequence[Part]) -> tuple[tuple[Specification, Signature], list[Projection]]:
    """Split parts into what all of them share and what each keeps to itself.

    A property belongs to the core when every part has a property of that
    name and all of them are pairwise equivalent; methods likewise, using
    alpha-equivalence.  Core entries keep the first part's order and values.
    """
    if not parts:
        raise ValueError("core_and_projections needs at least one part")

    def shared_props(name: str) -> bool:
        props = []
        for _, s, _ in parts:
            if name not in s:
                return False
            props.append(s.get(name))
        return all(eq_property(p, q) for i, p in enumerate(props) for q in props[i + 1:])

    def shared_methods(name: str) -> bool:
        meths = []
        for _, _, g in parts:
            if name not in g:
                return False
            meths.append(g.get(name))
        return all(alpha_equivalent(m, n) for i, m in enumerate(meths) for n in meths[i + 1:])

    _, first_spec, first_sig = parts[0]
    core_props = [p.name for p in first_spec if shared_props(p.name)]
    core_meths = [m.name for m in first_sig if shared_methods(m.name)]
    core = (Specification(tuple(first_spec.get(n) for n in core_props)),
            Signature(tuple(first_sig.get(n) for n in core_meths)))
    projections = [
        Projection(label,
                   Specification(tuple(p for p in s if p.name not in core_props)),
                   Signature(tuple(m for m in g if m.name not in core_meths)))
        for label, s, g in parts]
    return core, projections


def _parts(objects: Sequence[FuzzyObject], kb: KnowledgeBase) -> list[Part]:
    out = []
    for obj in objects:
        s, g = kb.class_of(obj).shape(obj.id)
        out.append((obj.id, s, g))
    return out


def _register(kb: KnowledgeBase, op: str, objects: Sequence[FuzzyObject], body) -> FuzzyClass:
    name = kb.fresh_class_name(op, [o.class_name for o in objects])
    cls = kb.add_class(FuzzyClass(name, body))
    kb.record(op, [o.id for o in objects], name)
    return cls


def union_all(objects: Sequence[FuzzyObject], kb: KnowledgeBase) -> tuple[ObjectSet, FuzzyClass]:
    """n-ary union; the core is computed mutually over all objects."""
    ids = [o.id for o in objects]
    if len(set(ids)) != len(ids):
        raise DuplicateId(f"union of repeated object ids {ids}")
    (core_spec, core_sig), projections = core_and_projections(_parts(objects, kb))
    if all(p.is_empty() for p in projections):
        body = Homogeneous(core_spec, core_sig)
    else:
        body = Heterogeneous(core_spec, core_sig, tuple(projections))
    cls = _register(kb, "union", objects, body)
    return ObjectSet(tuple(objects), cls.name), cls


def union(a: FuzzyObject, b: FuzzyObject, kb: KnowledgeBase) -> tuple[ObjectSet, FuzzyClass]:
    return union_all([a, b], kb)


def intersection(a: FuzzyObject, b: FuzzyObject, kb: KnowledgeBase) -> FuzzyClass:
    (core_spec, core_sig), _ = core_and_projections(_parts([a, b], kb))
    if not len(core_spec) and not len(core_sig):
        raise EmptyCore(f"{a.id} and {b.id} share no properties or methods")
    return _register(kb, "intersection", [a, b], Homogeneous(core_spec, core_sig))


def difference(a: FuzzyObject, b: FuzzyObject, kb: KnowledgeBase) -> FuzzyClass:
    _, (proj_a, _) = core_and_projections(_parts([a, b], kb))
    if proj_a.is_empty():
        raise EmptyResult(f"{a.id} has nothing that {b.id} lacks")
    return _register(kb, "difference", [a, b], Homogeneous(proj_a.spec, proj_a.sig))


def symmetric_difference(a: FuzzyObject, b: FuzzyObject, kb: KnowledgeBase) -> FuzzyClass:
    _, projections = core_and_projections(_parts([a, b], kb))
    if all(p.is_empty() for p in projections):
        raise EmptyResult(f"{a.id} and {b.id} have no distinguishing members")
    body = Heterogeneous(Specification(), Signature(), tuple(projections))
    return _register(kb, "symmetric_difference", [a, b], body)


def clone(a: FuzzyObject, n: int, kb: KnowledgeBase) -> FuzzyObject:
    """Numbered copy ``<id>_<n>`` of ``a`` with the same class."""
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ValueError(f"clone index must be a positive integer, got {n!r}")
    new_id = f"{a.id}_{n}"
    if new_id in kb.objects:
        raise IdCollision(f"object {new_id!r} already exists")
    # values are immutable, so sharing the specification is a deep copy in effect
    copy = kb.add_object(FuzzyObject(new_id, a.class_name, a.spec))
    kb.record("clone", [a.id], new_id)
    return copy
