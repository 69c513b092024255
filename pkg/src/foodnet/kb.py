"""In-memory knowledge base: the registry of classes, objects, rules and derivations.

Reads are unrestricted.  Registrations go through a lock so that a single
writer at a time mutates the registry.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from typing import Iterable

from .errors import DuplicateId, IdCollision, UnknownClass, UnknownObject, ValidationError
from .model import FuzzyClass, FuzzyObject, Heterogeneous, Verification, compatible

_SUBSCRIPT = re.compile(r"^(.*?)_(\d+)$")


@dataclass(frozen=True)
class Derivation:
    operation: str
    inputs: tuple[str, ...]
    output: str


class KnowledgeBase:
    def __init__(self, classes: Iterable[FuzzyClass] = (), objects: Iterable[FuzzyObject] = (),
                 rules: Iterable = (), derivations: Iterable[Derivation] = ()):
        self._lock = threading.Lock()
        self.classes: dict[str, FuzzyClass] = {}
        self.objects: dict[str, FuzzyObject] = {}
        self.rules: list = list(rules)
        self.derivations: list[Derivation] = list(derivations)
        for c in classes:
            self.add_class(c)
        for o in objects:
            self.add_object(o)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        return (list(self.classes.items()) == list(other.classes.items())
                and list(self.objects.items()) == list(other.objects.items())
                and self.rules == other.rules
                and self.derivations == other.derivations)

    def __repr__(self) -> str:
        return (f"KnowledgeBase({len(self.classes)} classes, {len(self.objects)} objects, "
                f"{len(self.rules)} rules, {len(self.derivations)} derivations)")

    def copy(self) -> "KnowledgeBase":
        return KnowledgeBase(self.classes.values(), self.objects.values(),
                             self.rules, self.derivations)

    # -- registration --------------------------------------------------------

    def add_class(self, cls: FuzzyClass) -> FuzzyClass:
        with self._lock:
            if cls.name in self.classes:
                raise DuplicateId(f"class {cls.name!r} already exists")
            self.classes[cls.name] = cls
        return cls

    def add_object(self, obj: FuzzyObject) -> FuzzyObject:
        with self._lock:
            if obj.id in self.objects:
                raise IdCollision(f"object {obj.id!r} already exists")
            self.objects[obj.id] = obj
        return obj

    def record(self, operation: str, inputs: Iterable[str], output: str) -> Derivation:
        d = Derivation(operation, tuple(inputs), output)
        with self._lock:
            self.derivations.append(d)
        return d

    # -- lookup and naming ---------------------------------------------------

    def class_of(self, obj: FuzzyObject) -> FuzzyClass:
        try:
            return self.classes[obj.class_name]
        except KeyError:
            raise UnknownClass(f"object {obj.id} refers to unknown class {obj.class_name!r}") from None

    def object(self, id: str) -> FuzzyObject:
        try:
            return self.objects[id]
        except KeyError:
            raise UnknownObject(f"no object {id!r}") from None

    def fresh_class_name(self, operation: str, inputs: Iterable[str]) -> str:
        """``<op>(<name1>,<name2>,...)#<n>`` with the smallest unused ``n``."""
        stem = f"{operation}({','.join(inputs)})#"
        n = 1
        while f"{stem}{n}" in self.classes:
            n += 1
        return f"{stem}{n}"

    def next_subscript_id(self, id: str) -> str:
        """Next free id in the subscript sequence A, A_1, A_2, ..."""
        m = _SUBSCRIPT.match(id)
        base = m.group(1) if m else id
        n = 1
        while f"{base}_{n}" in self.objects:
            n += 1
        return f"{base}_{n}"

    def lineage(self, id: str) -> list[str]:
        """Ids the object was derived from by modification or cloning, nearest first."""
        out, current = [], id
        while True:
            parent = next((d.inputs[0] for d in reversed(self.derivations)
                           if d.output == current and d.operation in ("modify", "clone")
                           and d.inputs), None)
            if parent is None or parent in out or parent == id:
                return out
            out.append(parent)
            current = parent

    # -- referential checks --------------------------------------------------

    def validate(self) -> None:
        """Raise ``ValidationError`` on the first dangling reference or shape mismatch."""
        for i, obj in enumerate(self.objects.values()):
            path = f"$.objects[{i}]"
            if obj.class_name not in self.classes:
                raise ValidationError(f"object {obj.id!r} refers to missing class {obj.class_name!r}",
                                      f"{path}.class")
            class_spec = self.classes[obj.class_name].shape(obj.id)[0]
            if set(class_spec.names()) != set(obj.spec.names()):
                raise ValidationError(
                    f"object {obj.id!r} properties {list(obj.spec.names())} do not match "
                    f"class {obj.class_name!r} properties {list(class_spec.names())}", f"{path}.spec")
            for j, p in enumerate(obj.spec):
                if not compatible(class_spec.value(p.name), p.value):
                    raise ValidationError(
                        f"property {p.name!r} has kind {p.value.kind}, class declares "
                        f"{class_spec.value(p.name).kind}", f"{path}.spec[{j}]")
        for i, cls in enumerate(self.classes.values()):
            # each shape a member of the class sees: core plus its own projection
            shapes = [cls.shape()] if cls.homogeneous else [
                cls.shape(p.label) for p in cls.body.projections]
            for s, g in shapes:
                visible = {p.name: p.value for p in s}
                for m in g:
                    for name in (m.guard.properties if m.guard else ()):
                        if name in visible and not isinstance(visible[name], Verification):
                            raise ValidationError(
                                f"guard of {m.name!r} tests non-verification property {name!r}",
                                f"$.classes[{i}]")
        known = set()
        for cls in self.classes.values():
            known.update(cls.shape()[0].names())
            if isinstance(cls.body, Heterogeneous):
                for p in cls.body.projections:
                    known.update(p.spec.names())
        for i, rule in enumerate(self.rules):
            for name in (rule.dependent, *rule.sources):
                if name not in known:
                    raise ValidationError(f"rule refers to unknown property {name!r}", f"$.rules[{i}]")
        names = set(self.classes) | set(self.objects)
        for i, d in enumerate(self.derivations):
            if d.output not in names:
                raise ValidationError(f"derivation output {d.output!r} does not resolve",
                                      f"$.derivations[{i}].output")
