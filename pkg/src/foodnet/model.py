"""Properties, specifications, signatures, fuzzy objects and fuzzy classes."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union

from .errors import (
    ArityMismatch,
    InvariantError,
    KindMismatch,
    UnknownClass,
    UnknownProperty,
)
from .expr import MethodDef, alpha_equivalent
from .fuzzy import (
    TOL,
    Degree,
    Type1FuzzySet,
    Type2FuzzySet,
    _check_scalar,
    close,
    lift,
)

_IDENT = re.compile(r"\S+")


# -- property values ---------------------------------------------------------

@dataclass(frozen=True)
class CrispScalar:
    value: float
    unit: str = ""
    kind = "crisp"

    def __post_init__(self):
        object.__setattr__(self, "value", _check_scalar(self.value))


@dataclass(frozen=True)
class CrispTuple:
    values: tuple[float, ...]
    unit: str = ""
    kind = "crisp_tuple"

    def __post_init__(self):
        if not self.values:
            raise InvariantError("a crisp tuple needs at least one component")
        object.__setattr__(self, "values", tuple(_check_scalar(v) for v in self.values))


@dataclass(frozen=True)
class Fuzzy1:
    set: Type1FuzzySet
    unit: str = ""
    kind = "fuzzy"

    def __post_init__(self):
        if not isinstance(self.set, Type1FuzzySet):
            raise InvariantError("Fuzzy1 holds a type-1 fuzzy set")


@dataclass(frozen=True)
class Fuzzy2:
    set: Type2FuzzySet
    unit: str = ""
    kind = "fuzzy2"

    def __post_init__(self):
        if not isinstance(self.set, Type2FuzzySet):
            raise InvariantError("Fuzzy2 holds a type-2 fuzzy set")


@dataclass(frozen=True)
class TupleOfFuzzy:
    components: tuple[Type1FuzzySet | Type2FuzzySet, ...]
    unit: str = ""
    kind = "fuzzy_tuple"

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise InvariantError("a fuzzy tuple needs at least one component")
        kinds = {type(c) for c in comps}
        if len(kinds) != 1 or not kinds <= {Type1FuzzySet, Type2FuzzySet}:
            raise InvariantError("fuzzy tuple components must be all type-1 or all type-2 sets")
        object.__setattr__(self, "components", comps)

    @property
    def order(self) -> int:
        return 2 if isinstance(self.components[0], Type2FuzzySet) else 1


@dataclass(frozen=True)
class Verification:
    degree: Degree
    kind = "verification"

    def __post_init__(self):
        if not isinstance(self.degree, Degree):
            object.__setattr__(self, "degree", Degree(self.degree))

    @property
    def value(self) -> float:
        return self.degree.value


PropertyValue = Union[CrispScalar, CrispTuple, Fuzzy1, Fuzzy2, TupleOfFuzzy, Verification]
PROPERTY_VALUE_TYPES = (CrispScalar, CrispTuple, Fuzzy1, Fuzzy2, TupleOfFuzzy, Verification)


def is_quantitative(value: PropertyValue) -> bool:
    return not isinstance(value, Verification)


def is_fuzzy(value: PropertyValue) -> bool:
    return isinstance(value, (Fuzzy1, Fuzzy2, TupleOfFuzzy))


# -- containers --------------------------------------------------------------

@dataclass(frozen=True)
class Property:
    name: str
    value: PropertyValue

    def __post_init__(self):
        if not isinstance(self.name, str) or not _IDENT.fullmatch(self.name):
            raise InvariantError(f"bad property name {self.name!r}")
        if not isinstance(self.value, PROPERTY_VALUE_TYPES):
            raise InvariantError(f"property {self.name}: not a property value: {self.value!r}")

    def __str__(self) -> str:
        from .notation import render_value
        return f"{self.name} = {render_value(self.value)}"


@dataclass(frozen=True)
class Specification:
    """Ordered, name-unique collection of properties.

    Emptiness is allowed here because generated class parts may be empty;
    objects enforce non-emptiness themselves.
    """

    properties: tuple[Property, ...] = ()

    def __post_init__(self):
        props = tuple(self.properties)
        seen = set()
        for p in props:
            if p.name in seen:
                raise InvariantError(f"duplicate property name {p.name!r}")
            seen.add(p.name)
        object.__setattr__(self, "properties", props)

    def __iter__(self) -> Iterator[Property]:
        return iter(self.properties)

    def __len__(self) -> int:
        return len(self.properties)

    def __contains__(self, name: str) -> bool:
        return any(p.name == name for p in self.properties)

    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.properties)

    def get(self, name: str) -> Property:
        for p in self.properties:
            if p.name == name:
                return p
        raise UnknownProperty(f"no property named {name!r}")

    def value(self, name: str) -> PropertyValue:
        return self.get(name).value


@dataclass(frozen=True)
class Signature:
    methods: tuple[MethodDef, ...] = ()

    def __post_init__(self):
        meths = tuple(self.methods)
        names = [m.name for m in meths]
        if len(set(names)) != len(names):
            raise InvariantError("duplicate method names in signature")
        object.__setattr__(self, "methods", meths)

    def __iter__(self) -> Iterator[MethodDef]:
        return iter(self.methods)

    def __len__(self) -> int:
        return len(self.methods)

    def __contains__(self, name: str) -> bool:
        return any(m.name == name for m in self.methods)

    def names(self) -> tuple[str, ...]:
        return tuple(m.name for m in self.methods)

    def get(self, name: str) -> MethodDef:
        for m in self.methods:
            if m.name == name:
                return m
        raise KeyError(name)


def spec(*props: Property) -> Specification:
    return Specification(tuple(props))


def sig(*methods: MethodDef) -> Signature:
    return Signature(tuple(methods))


@dataclass(frozen=True)
class FuzzyObject:
    id: str
    class_name: str
    spec: Specification

    def __post_init__(self):
        if not isinstance(self.id, str) or not _IDENT.fullmatch(self.id):
            raise InvariantError(f"bad object id {self.id!r}")
        if not len(self.spec):
            raise InvariantError(f"object {self.id} has an empty specification")


@dataclass(frozen=True)
class Homogeneous:
    spec: Specification
    sig: Signature = field(default_factory=Signature)


@dataclass(frozen=True)
class Projection:
    label: str
    spec: Specification
    sig: Signature = field(default_factory=Signature)

    def is_empty(self) -> bool:
        return not len(self.spec) and not len(self.sig)


@dataclass(frozen=True)
class Heterogeneous:
    core_spec: Specification
    core_sig: Signature
    projections: tuple[Projection, ...]

    def __post_init__(self):
        projs = tuple(self.projections)
        object.__setattr__(self, "projections", projs)
        if not projs:
            raise InvariantError("a heterogeneous class needs at least one projection")
        labels = [p.label for p in projs]
        if len(set(labels)) != len(labels):
            raise InvariantError("duplicate projection labels")
        core_props, core_meths = set(self.core_spec.names()), set(self.core_sig.names())
        for p in projs:
            if core_props & set(p.spec.names()):
                raise InvariantError(f"projection {p.label} repeats core properties")
            if core_meths & set(p.sig.names()):
                raise InvariantError(f"projection {p.label} repeats core methods")

    def projection(self, label: str) -> Projection:
        for p in self.projections:
            if p.label == label:
                return p
        raise KeyError(label)


@dataclass(frozen=True)
class FuzzyClass:
    name: str
    body: Homogeneous | Heterogeneous

    def __post_init__(self):
        if not isinstance(self.name, str) or not _IDENT.fullmatch(self.name):
            raise InvariantError(f"bad class name {self.name!r}")
        if isinstance(self.body, Homogeneous) and not len(self.body.spec) and not len(self.body.sig):
            raise InvariantError(f"class {self.name} has neither properties nor methods")

    @property
    def homogeneous(self) -> bool:
        return isinstance(self.body, Homogeneous)

    def shape(self, label: str | None = None) -> tuple[Specification, Signature]:
        """Specification and signature seen by a member.

        For a heterogeneous class this is the core plus the projection named
        ``label`` (core alone when there is no such projection).
        """
        if isinstance(self.body, Homogeneous):
            return self.body.spec, self.body.sig
        props, meths = list(self.body.core_spec), list(self.body.core_sig)
        for p in self.body.projections:
            if p.label == label:
                props += list(p.spec)
                meths += list(p.sig)
        return Specification(tuple(props)), Signature(tuple(meths))


def homogeneous(name: str, props: Iterable[Property], methods: Iterable[MethodDef] = ()) -> FuzzyClass:
    return FuzzyClass(name, Homogeneous(Specification(tuple(props)), Signature(tuple(methods))))


# -- equivalence predicates --------------------------------------------------

def _set_equivalent(s, t, tol: float = TOL) -> bool:
    """Equivalence of two discrete fuzzy sets without units.

    Equal cardinality, aligned memberships (grade sets for type-2) equal,
    and equal spacing between consecutive support values.  Actual support
    values are not compared.
    """
    if type(s) is not type(t) or len(s) != len(t):
        return False
    if isinstance(s, Type2FuzzySet):
        if not all(g.approx_eq(h, tol) for g, h in zip(s.grade_sets, t.grade_sets)):
            return False
    elif not all(close(m, n, tol) for m, n in zip(s.memberships, t.memberships)):
        return False
    vs, ws = s.values, t.values
    return all(close(vs[k + 1] - vs[k], ws[k + 1] - ws[k], tol) for k in range(len(vs) - 1))


def eq_quantitative(p: Property, q: Property) -> bool:
    a, b = p.value, q.value
    if not is_quantitative(a) or not is_quantitative(b):
        raise KindMismatch("eq_quantitative needs two quantitative properties")
    if a.unit != b.unit or type(a) is not type(b):
        return False
    if isinstance(a, CrispScalar):
        return close(a.value, b.value)
    if isinstance(a, CrispTuple):
        return len(a.values) == len(b.values) and all(
            close(x, y) for x, y in zip(a.values, b.values))
    if isinstance(a, TupleOfFuzzy):
        return len(a.components) == len(b.components) and all(
            _set_equivalent(s, t) for s, t in zip(a.components, b.components))
    return _set_equivalent(a.set, b.set)


def eq_qualitative(p: Property, q: Property) -> bool:
    a, b = p.value, q.value
    if not isinstance(a, Verification) or not isinstance(b, Verification):
        raise KindMismatch("eq_qualitative needs two verification properties")
    return close(a.value, b.value)


def eq_property(p: Property, q: Property) -> bool:
    if p.name != q.name or p.value.kind != q.value.kind:
        return False
    if isinstance(p.value, Verification):
        return eq_qualitative(p, q)
    return eq_quantitative(p, q)


def eq_spec(s: Specification, t: Specification) -> bool:
    return s.names() == t.names() and all(eq_property(p, q) for p, q in zip(s, t))


def eq_sig(s: Signature, t: Signature) -> bool:
    return s.names() == t.names() and all(alpha_equivalent(m, n) for m, n in zip(s, t))


def object_signature(obj: FuzzyObject, classes: Mapping[str, FuzzyClass]) -> Signature:
    try:
        cls = classes[obj.class_name]
    except KeyError:
        raise UnknownClass(f"object {obj.id} refers to unknown class {obj.class_name!r}") from None
    return cls.shape(obj.id)[1]


def same_type(a: FuzzyObject, b: FuzzyObject, classes: Mapping[str, FuzzyClass]) -> bool:
    """Equivalent specifications and alpha-equivalent signatures, aligned by name."""
    return eq_spec(a.spec, b.spec) and eq_sig(
        object_signature(a, classes), object_signature(b, classes))


# -- instantiation -----------------------------------------------------------

def _lift_component(s: Type1FuzzySet, grades, where: str) -> Type2FuzzySet:
    if grades is None:
        return lift(s)
    grades = list(grades)
    if len(grades) != len(s):
        raise ArityMismatch(f"{where}: {len(grades)} grade sets for {len(s)} values")
    return lift(s, grades)


def instantiate(cls: FuzzyClass, id: str,
                secondary: Mapping[str, list] | None = None) -> FuzzyObject:
    """Create an object of a homogeneous class.

    Type-1 fuzzy properties become type-2 ones.  ``secondary`` maps a
    property name to one grade set per primary value; for a tuple of fuzzy
    sets it may hold one such list per component, or a single list that
    applies to every component.
    """
    if not cls.homogeneous:
        raise InvariantError(f"cannot instantiate heterogeneous class {cls.name}")
    secondary = dict(secondary or {})
    class_spec = cls.body.spec
    for name in secondary:
        if name not in class_spec:
            raise UnknownProperty(f"class {cls.name} has no property {name!r}")
        if not isinstance(class_spec.value(name), (Fuzzy1, TupleOfFuzzy)) or (
                isinstance(class_spec.value(name), TupleOfFuzzy)
                and class_spec.value(name).order != 1):
            raise KindMismatch(f"property {name!r} is not a type-1 fuzzy property")
    props = []
    for p in class_spec:
        v, grades = p.value, secondary.get(p.name)
        if isinstance(v, Fuzzy1):
            v = Fuzzy2(_lift_component(v.set, grades, p.name), v.unit)
        elif isinstance(v, TupleOfFuzzy) and v.order == 1:
            if grades is not None and grades and isinstance(grades[0], Type1FuzzySet):
                per_component = [grades] * len(v.components)
            else:
                per_component = grades if grades is not None else [None] * len(v.components)
            if len(per_component) != len(v.components):
                raise ArityMismatch(
                    f"{p.name}: {len(per_component)} grade lists for {len(v.components)} components")
            v = TupleOfFuzzy(tuple(
                _lift_component(c, g, f"{p.name}[{i}]")
                for i, (c, g) in enumerate(zip(v.components, per_component))), v.unit)
        props.append(Property(p.name, v))
    return FuzzyObject(id, cls.name, Specification(tuple(props)))


def class_level(value: PropertyValue) -> PropertyValue:
    """Class-level view of an object value: type-2 sets collapse to type-1."""
    if isinstance(value, Fuzzy2):
        return Fuzzy1(value.set.principal(), value.unit)
    if isinstance(value, TupleOfFuzzy) and value.order == 2:
        return TupleOfFuzzy(tuple(c.principal() for c in value.components), value.unit)
    return value


def compatible(class_value: PropertyValue, object_value: PropertyValue) -> bool:
    """Whether an object value fits the kind declared by its class."""
    return class_value.kind == class_level(object_value).kind
