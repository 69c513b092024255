"""Modifiers, dependency rules and the reflection check.

A dependency rule states that one property (the dependent) is determined by
others (its sources).  After a modifier runs, every applicable rule is
checked.  In ``strict`` mode a broken rule aborts the modification; in
``auto`` mode verification dependents are recomputed from their sources,
while quantitative dependents still have to be changed explicitly.

Methods whose guard no longer holds on the successor, or that read a
property the successor lost, are dropped from the successor's class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, NamedTuple, Sequence, Union

from .errors import (
    EvalError,
    InvariantError,
    KindViolation,
    ReflectionViolation,
    UnknownTarget,
)
from .evaluate import evaluate_scalar, guard_holds
from .expr import Node, names
from .fuzzy import (
    TOL,
    Degree,
    Type1FuzzySet,
    Type2FuzzySet,
    close,
    concentration,
    dilution,
    map_unary,
    map_unary_type2,
)
from .kb import KnowledgeBase
from .model import (
    CrispScalar,
    CrispTuple,
    Fuzzy1,
    Fuzzy2,
    FuzzyClass,
    FuzzyObject,
    Homogeneous,
    Property,
    PropertyValue,
    Signature,
    Specification,
    TupleOfFuzzy,
    Verification,
    class_level,
    is_fuzzy,
    is_quantitative,
)

MODIFIER_KINDS = ("complete", "partial", "generating", "destroying", "replacing")
CHECKS = ("all-equal-components", "all-components-equal-constant", "custom-degree-bound")
MODES = ("strict", "auto")

# an unequal-components degree must stay clear of 1 by more than the tolerance
_BELOW_ONE = 1.0 - 1e-6


# -- actions -----------------------------------------------------------------

@dataclass(frozen=True)
class SetValue:
    value: PropertyValue


@dataclass(frozen=True)
class Dilute:
    k: int


@dataclass(frozen=True)
class Concentrate:
    n: int


@dataclass(frozen=True)
class MapValues:
    body: Node

    def __post_init__(self):
        free = names(self.body)
        if len(free) != 1:
            raise InvariantError(f"a value map needs exactly one free variable, got {free}")

    @property
    def variable(self) -> str:
        return names(self.body)[0]


@dataclass(frozen=True)
class Remove:
    pass


@dataclass(frozen=True)
class Add:
    value: PropertyValue


ModAction = Union[SetValue, Dilute, Concentrate, MapValues, Remove, Add]


@dataclass(frozen=True)
class Modifier:
    kind: str
    actions: tuple[tuple[str, ModAction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(tuple(a) for a in self.actions))
        if self.kind not in MODIFIER_KINDS:
            raise InvariantError(f"modifier kind must be one of {MODIFIER_KINDS}")
        targets = [t for t, _ in self.actions]
        if len(set(targets)) != len(targets):
            raise InvariantError("a modifier touches each property at most once")
        allowed = {
            "generating": (Add,),
            "destroying": (Remove,),
            "replacing": (SetValue,),
        }.get(self.kind, (SetValue, Dilute, Concentrate, MapValues))
        for t, a in self.actions:
            if not isinstance(a, allowed):
                raise InvariantError(f"{self.kind} modifier cannot {type(a).__name__} {t!r}")

    @property
    def targets(self) -> tuple[str, ...]:
        return tuple(t for t, _ in self.actions)


def partial(**actions: ModAction) -> Modifier:
    return Modifier("partial", tuple(actions.items()))


# -- dependency rules --------------------------------------------------------

@dataclass(frozen=True)
class DependencyRule:
    dependent: str
    sources: tuple[str, ...]
    check: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))
        if self.check not in CHECKS:
            raise InvariantError(f"unknown check {self.check!r}; expected one of {CHECKS}")
        if self.dependent in self.sources:
            raise InvariantError(f"{self.dependent!r} cannot depend on itself")
        if self.check == "all-components-equal-constant" and "constant" not in self.params:
            raise InvariantError("all-components-equal-constant needs a 'constant' parameter")

    def __str__(self) -> str:
        extra = "".join(f", {k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.dependent} <- {self.check}({', '.join(self.sources)}{extra})"


@dataclass(frozen=True)
class Violation:
    rule: DependencyRule
    dependent: str
    observed: str
    required: str

    def __str__(self) -> str:
        return f"rule {self.rule} broken: {self.dependent} is {self.observed}, required {self.required}"


def _components(value: PropertyValue) -> list:
    if isinstance(value, CrispScalar):
        return [value.value]
    if isinstance(value, CrispTuple):
        return list(value.values)
    if isinstance(value, (Fuzzy1, Fuzzy2)):
        return [value.set]
    if isinstance(value, TupleOfFuzzy):
        return list(value.components)
    return [value.value]


def _same(x, y) -> bool:
    if isinstance(x, float) and isinstance(y, float):
        return close(x, y)
    return type(x) is type(y) and x.approx_eq(y)


def _magnitude(c) -> float:
    """Representative size of a component: the value itself, or a centroid."""
    if isinstance(c, Type2FuzzySet):
        c = c.principal()
    if isinstance(c, Type1FuzzySet):
        total = sum(c.memberships)
        return abs(sum(v * mu for v, mu in c) / total) if total else 0.0
    return abs(c)


def _ratio_degree(pairs) -> float:
    """Smallest min/max ratio across pairs, held below 1."""
    deg = 1.0
    for x, y in pairs:
        hi = max(_magnitude(x), _magnitude(y))
        if hi > 0:
            deg = min(deg, min(_magnitude(x), _magnitude(y)) / hi)
    return min(max(deg, 0.0), _BELOW_ONE)


def _evaluate_rule(rule: DependencyRule, s: Specification):
    """Return (holds, observed, required, recomputed-degree-or-None)."""
    dep = s.value(rule.dependent)
    comps = [c for name in rule.sources for c in _components(s.value(name))]
    if rule.check == "custom-degree-bound":
        if not isinstance(dep, Verification):
            raise KindViolation(f"{rule.dependent!r} must be a verification property for {rule.check}")
        lower = float(rule.params.get("lower", 0.0))
        upper = float(rule.params.get("upper", 1.0))
        for name in rule.sources:
            src = s.value(name)
            if not isinstance(src, Verification):
                raise KindViolation(f"source {name!r} of {rule.check} must be a verification property")
            upper = min(upper, src.value)
        d = dep.value
        ok = lower - TOL <= d <= upper + TOL
        return ok, f"{d:g}", f"within [{lower:g}, {upper:g}]", min(max(d, lower), max(upper, lower))
    if rule.check == "all-equal-components":
        if not isinstance(dep, Verification):
            comps = _components(dep) + comps
            equal = all(_same(comps[0], c) for c in comps[1:])
            return equal, "unequal" if not equal else "equal", "components equal to the sources", None
        equal = all(_same(comps[0], c) for c in comps[1:])
        recomputed = 1.0 if equal else _ratio_degree((comps[0], c) for c in comps[1:])
    else:
        k = float(rule.params["constant"])
        if any(not isinstance(c, float) for c in comps):
            raise KindViolation(f"{rule.check} needs crisp sources")
        equal = all(close(c, k) for c in comps)
        if not isinstance(dep, Verification):
            dep_comps = _components(dep)
            ok = all(isinstance(c, float) and close(c, k) for c in dep_comps)
            return ok, "unequal" if not ok else "equal", f"all components = {k:g}", None
        recomputed = 1.0 if equal else _ratio_degree((c, k) for c in comps)
    d = dep.value
    ok = close(d, 1.0) if equal else d < 1.0 - TOL
    return ok, f"{d:g}", "1" if equal else "< 1", recomputed


def _applicable(rule: DependencyRule, s: Specification) -> bool:
    return rule.dependent in s and all(name in s for name in rule.sources)


def check_consistency(obj: FuzzyObject, rules: Sequence[DependencyRule]) -> list[Violation]:
    """Violations of the rules that apply to ``obj``; rules naming absent properties are skipped."""
    out = []
    for rule in rules:
        if not _applicable(rule, obj.spec):
            continue
        ok, observed, required, _ = _evaluate_rule(rule, obj.spec)
        if not ok:
            out.append(Violation(rule, rule.dependent, observed, required))
    return out


# -- application -------------------------------------------------------------

def _map_value(value: PropertyValue, action: MapValues) -> PropertyValue:
    var = action.variable

    def f(x):
        return evaluate_scalar(action.body, var, x)

    if isinstance(value, CrispScalar):
        return CrispScalar(f(value.value), value.unit)
    if isinstance(value, CrispTuple):
        return CrispTuple(tuple(f(v) for v in value.values), value.unit)
    if isinstance(value, Fuzzy1):
        return Fuzzy1(map_unary(value.set, f), value.unit)
    if isinstance(value, Fuzzy2):
        return Fuzzy2(map_unary_type2(value.set, f), value.unit)
    return TupleOfFuzzy(tuple(
        map_unary(c, f) if isinstance(c, Type1FuzzySet) else map_unary_type2(c, f)
        for c in value.components), value.unit)


def _reshape_value(value: PropertyValue, fn, exponent: int) -> PropertyValue:
    if isinstance(value, Verification):
        return Verification(fn(value.degree, exponent))
    if isinstance(value, (Fuzzy1, Fuzzy2)):
        return type(value)(fn(value.set, exponent), value.unit)
    return TupleOfFuzzy(tuple(fn(c, exponent) for c in value.components), value.unit)


def _apply_action(name: str, value: PropertyValue | None, action: ModAction, kind: str) -> PropertyValue:
    if isinstance(action, SetValue):
        if kind == "replacing":
            if action.value.kind == value.kind:
                raise KindViolation(f"replacing {name!r} needs a value of a different kind")
        elif action.value.kind != value.kind:
            raise KindViolation(
                f"cannot set {value.kind} property {name!r} to a {action.value.kind} value")
        return action.value
    if isinstance(action, (Dilute, Concentrate)):
        if not (isinstance(value, Verification) or is_fuzzy(value)):
            raise KindViolation(f"{type(action).__name__} needs a fuzzy or verification property, "
                                f"{name!r} is {value.kind}")
        if isinstance(action, Dilute):
            return _reshape_value(value, dilution, action.k)
        return _reshape_value(value, concentration, action.n)
    if isinstance(action, MapValues):
        if not is_quantitative(value):
            raise KindViolation(f"cannot map values of verification property {name!r}")
        return _map_value(value, action)
    raise AssertionError(action)


def _check_targets(obj: FuzzyObject, m: Modifier) -> None:
    existing = obj.spec.names()
    for t, a in m.actions:
        if isinstance(a, Add):
            if t in existing:
                raise KindViolation(f"generating modifier cannot add existing property {t!r}")
        elif t not in existing:
            raise UnknownTarget(f"{obj.id} has no property {t!r}")
    touched = set(m.targets)
    if m.kind == "partial" and touched and touched >= set(existing):
        raise KindViolation("a partial modifier must leave at least one property untouched")
    if m.kind == "complete" and touched != set(existing):
        raise KindViolation("a complete modifier must touch every property")
    if m.kind == "destroying" and touched >= set(existing):
        raise KindViolation("a destroying modifier cannot remove every property")


def modified_spec(obj: FuzzyObject, m: Modifier) -> Specification:
    """Specification after the modifier's actions, before any rule checking."""
    _check_targets(obj, m)
    acts = dict(m.actions)
    props = []
    for p in obj.spec:
        a = acts.get(p.name)
        if a is None:
            props.append(p)
        elif not isinstance(a, Remove):
            props.append(Property(p.name, _apply_action(p.name, p.value, a, m.kind)))
    props += [Property(t, a.value) for t, a in m.actions if isinstance(a, Add)]
    return Specification(tuple(props))


def reflect(s: Specification, rules: Sequence[DependencyRule], mode: str) -> Specification:
    """Enforce rules on ``s``: raise in strict mode, repair verification dependents in auto mode."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if mode == "auto":
        for rule in rules:
            if not _applicable(rule, s) or not isinstance(s.value(rule.dependent), Verification):
                continue
            ok, _, _, recomputed = _evaluate_rule(rule, s)
            if not ok:
                s = Specification(tuple(
                    Property(p.name, Verification(Degree(recomputed))) if p.name == rule.dependent else p
                    for p in s))
    probe = FuzzyObject("_", "_", s)
    violations = check_consistency(probe, rules)
    if violations:
        raise ReflectionViolation(violations)
    return s


class ModifyResult(NamedTuple):
    obj: FuzzyObject
    cls: FuzzyClass
    dropped: tuple[str, ...]
    generated: bool


def apply_modifier(obj: FuzzyObject, m: Modifier, kb: KnowledgeBase,
                   rules: Sequence[DependencyRule] | None = None,
                   mode: str = "strict") -> ModifyResult:
    """Apply ``m`` to ``obj`` and register the successor (and its class if new).

    The input object is left untouched.  ``rules`` defaults to the
    knowledge base's rules.
    """
    rules = kb.rules if rules is None else rules
    new_spec = reflect(modified_spec(obj, m), rules, mode)
    new_id = kb.next_subscript_id(obj.id)

    base = kb.class_of(obj)
    class_spec, class_sig = base.shape(obj.id)
    class_props = []
    for p in new_spec:
        unchanged = p.name in obj.spec and obj.spec.value(p.name) == p.value and p.name in class_spec
        class_props.append(class_spec.get(p.name) if unchanged else Property(p.name, class_level(p.value)))
    successor_probe = FuzzyObject(new_id, base.name, new_spec)
    kept, dropped = [], []
    for meth in class_sig:
        refs_ok = all(r in new_spec for r in meth.property_refs())
        (kept if refs_ok and guard_holds(meth, successor_probe) else dropped).append(meth)

    new_class_spec, new_sig = Specification(tuple(class_props)), Signature(tuple(kept))
    generated = not (base.homogeneous and new_class_spec == class_spec and new_sig == class_sig)
    if generated:
        name = kb.fresh_class_name("modify", [base.name])
        cls = kb.add_class(FuzzyClass(name, Homogeneous(new_class_spec, new_sig)))
        kb.record("modify", [obj.id], name)
    else:
        cls = base
    successor = kb.add_object(FuzzyObject(new_id, cls.name, new_spec))
    kb.record("modify", [obj.id], new_id)
    return ModifyResult(successor, cls, tuple(mm.name for mm in dropped), generated)


def apply_fuzzy_modifier(obj: FuzzyObject, target: str, action: Dilute | Concentrate,
                         kb: KnowledgeBase, rules: Sequence[DependencyRule] | None = None,
                         mode: str = "strict") -> ModifyResult:
    if not isinstance(action, (Dilute, Concentrate)):
        raise KindViolation("apply_fuzzy_modifier takes a Dilute or Concentrate action")
    if target not in obj.spec:
        raise UnknownTarget(f"{obj.id} has no property {target!r}")
    if len(obj.spec) == 1:
        # a lone property cannot be touched by a strict-subset partial modifier
        m = Modifier("complete", ((target, action),))
    else:
        m = Modifier("partial", ((target, action),))
    return apply_modifier(obj, m, kb, rules, mode)
