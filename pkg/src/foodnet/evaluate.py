"""Evaluate method expressions against a subject object.

Crisp sub-expressions fold to numbers.  At most one fuzzy (or tuple) operand
may take part; it is carried as its source value plus the composed scalar
function, and the function is pushed through the source with the extension
principle once evaluation finishes.

Units follow a single base unit raised to an integer power, so ``a^2`` over
a ``cm`` value yields ``cm^2``.  Bare numbers are dimensionless and adopt
the other operand's unit under ``+`` and ``-``.  ``sin``/``cos`` accept
dimensionless (radian) or degree arguments.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from typing import Any, Callable, Mapping

from .errors import (
    EvalError,
    GuardFailed,
    MultiFuzzyOperands,
    UnboundParameter,
    UnitError,
    UnknownProperty,
)
from .expr import BinOp, Call, MethodDef, Name, Node, Num
from .fuzzy import Degree, Type1FuzzySet, Type2FuzzySet, close, map_unary, map_unary_type2
from .model import (
    CrispScalar,
    CrispTuple,
    Fuzzy1,
    Fuzzy2,
    FuzzyObject,
    PropertyValue,
    TupleOfFuzzy,
    Verification,
)

DEGREE_UNITS = frozenset({"deg", "degree", "degrees", "°"})

Dim = tuple[str, int]
DIMENSIONLESS: Dim = ("", 0)


def parse_unit(unit: str) -> Dim:
    if not unit:
        return DIMENSIONLESS
    base, sep, exp = unit.partition("^")
    if sep:
        try:
            return (base, int(exp))
        except ValueError:
            pass
    return (unit, 1)


def render_unit(dim: Dim) -> str:
    base, exp = dim
    if exp == 0:
        return ""
    return base if exp == 1 else f"{base}^{exp}"


@dataclass(frozen=True)
class _Crisp:
    value: float
    dim: Dim


@dataclass(frozen=True)
class _Lifted:
    source: Any  # Type1FuzzySet, Type2FuzzySet or a tuple of sets / floats
    fn: Callable[[float], float]
    dim: Dim


def _identity(x: float) -> float:
    return x


def guard_holds(m: MethodDef, subject: FuzzyObject) -> bool:
    if m.guard is None:
        return True
    for name, deg in m.guard.checks:
        if name not in subject.spec:
            return False
        value = subject.spec.value(name)
        if not isinstance(value, Verification) or not close(value.value, deg):
            return False
    return True


def _operand(value, where: str):
    if isinstance(value, bool):
        raise EvalError(f"{where}: booleans are not numbers")
    if isinstance(value, (int, float)):
        return _Crisp(float(value), DIMENSIONLESS)
    if isinstance(value, Degree):
        return _Crisp(value.value, DIMENSIONLESS)
    if isinstance(value, Verification):
        return _Crisp(value.value, DIMENSIONLESS)
    if isinstance(value, CrispScalar):
        return _Crisp(value.value, parse_unit(value.unit))
    if isinstance(value, CrispTuple):
        return _Lifted(value.values, _identity, parse_unit(value.unit))
    if isinstance(value, (Fuzzy1, Fuzzy2)):
        return _Lifted(value.set, _identity, parse_unit(value.unit))
    if isinstance(value, TupleOfFuzzy):
        return _Lifted(value.components, _identity, parse_unit(value.unit))
    if isinstance(value, (Type1FuzzySet, Type2FuzzySet)):
        return _Lifted(value, _identity, DIMENSIONLESS)
    raise EvalError(f"{where}: cannot use {type(value).__name__} as an operand")


def _index(op, idx: int, where: str):
    if isinstance(op, _Lifted) and isinstance(op.source, tuple):
        if not 0 <= idx < len(op.source):
            raise EvalError(f"{where}: index {idx} out of range")
        item = op.source[idx]
        if isinstance(item, float):
            return _Crisp(item, op.dim)
        return _Lifted(item, _identity, op.dim)
    raise EvalError(f"{where}: only tuple values can be indexed")


def _mul_dim(a: Dim, b: Dim, sign: int) -> Dim:
    if b[1] == 0:
        return a
    if a[1] == 0:
        return (b[0], sign * b[1])
    if a[0] != b[0]:
        raise UnitError(f"mixed units {a[0]!r} and {b[0]!r}")
    exp = a[1] + sign * b[1]
    return (a[0], exp) if exp else DIMENSIONLESS


def _add_dim(a: Dim, b: Dim) -> Dim:
    if a == b or b[1] == 0:
        return a
    if a[1] == 0:
        return b
    raise UnitError(f"cannot add {render_unit(a)!r} and {render_unit(b)!r}")


_OPS = {"+": operator.add, "-": operator.sub, "*": operator.mul,
        "/": operator.truediv, "^": operator.pow}


def _binary(op: str, left, right):
    if isinstance(left, _Lifted) and isinstance(right, _Lifted):
        raise MultiFuzzyOperands(f"two fuzzy operands meet at {op!r}")
    if op in "+-":
        dim = _add_dim(left.dim, right.dim)
    elif op == "*":
        dim = _mul_dim(left.dim, right.dim, 1)
    elif op == "/":
        dim = _mul_dim(left.dim, right.dim, -1)
    else:
        if right.dim[1] != 0:
            raise UnitError("exponent must be dimensionless")
        if left.dim[1] == 0:
            dim = DIMENSIONLESS
        elif isinstance(right, _Crisp) and float(right.value).is_integer():
            dim = (left.dim[0], left.dim[1] * int(right.value)) if right.value else DIMENSIONLESS
        else:
            raise UnitError("a quantity with units needs an integer exponent")
    fn = _OPS[op]
    if isinstance(left, _Crisp) and isinstance(right, _Crisp):
        return _Crisp(_safe(fn, left.value, right.value), dim)
    if isinstance(left, _Lifted):
        f, c = left.fn, right.value
        return _Lifted(left.source, lambda x: fn(f(x), c), dim)
    f, c = right.fn, left.value
    return _Lifted(right.source, lambda x: fn(c, f(x)), dim)


def _safe(fn, *args) -> float:
    try:
        out = fn(*args)
    except (ArithmeticError, ValueError) as exc:
        raise EvalError(str(exc)) from exc
    if isinstance(out, complex) or not math.isfinite(out):
        raise EvalError("non-finite result")
    return float(out)


def _call(fn_name: str, arg):
    dim = arg.dim
    if fn_name in ("sin", "cos"):
        trig = math.sin if fn_name == "sin" else math.cos
        if dim[1] == 0:
            fn = trig
        elif dim[0] in DEGREE_UNITS and dim[1] == 1:
            fn = lambda x: trig(math.radians(x))  # noqa: E731
        else:
            raise UnitError(f"{fn_name} needs an angle, got {render_unit(dim)!r}")
        dim = DIMENSIONLESS
    elif fn_name == "sqrt":
        if dim[1] % 2:
            raise UnitError(f"sqrt of {render_unit(dim)!r}")
        fn = math.sqrt
        dim = (dim[0], dim[1] // 2) if dim[1] else DIMENSIONLESS
    else:
        fn = operator.neg
    if isinstance(arg, _Crisp):
        return _Crisp(_safe(fn, arg.value), dim)
    f = arg.fn
    return _Lifted(arg.source, lambda x: fn(f(x)), dim)


def _finish(op) -> PropertyValue:
    unit = render_unit(op.dim)
    if isinstance(op, _Crisp):
        return CrispScalar(op.value, unit)
    src, fn = op.source, op.fn
    if isinstance(src, Type1FuzzySet):
        return Fuzzy1(map_unary(src, fn), unit)
    if isinstance(src, Type2FuzzySet):
        return Fuzzy2(map_unary_type2(src, fn), unit)
    if isinstance(src[0], float):
        return CrispTuple(tuple(_safe(fn, x) for x in src), unit)
    return TupleOfFuzzy(tuple(
        map_unary(c, fn) if isinstance(c, Type1FuzzySet) else map_unary_type2(c, fn)
        for c in src), unit)


def evaluate(m: MethodDef, subject: FuzzyObject,
             bindings: Mapping[str, Any] | None = None) -> PropertyValue:
    """Apply method ``m`` to ``subject``.

    ``bindings`` supplies a value for every declared parameter: a number,
    a ``Degree``, a fuzzy set, or any property value.  Identifiers that are
    not parameters resolve against the subject's specification.
    """
    if not guard_holds(m, subject):
        raise GuardFailed(f"method {m.name} is undefined for {subject.id} (guard {m.guard} fails)")
    bindings = dict(bindings or {})
    for p in m.params:
        if p not in bindings:
            raise UnboundParameter(f"parameter {p!r} of {m.name} is not bound")

    def ev(node: Node):
        if isinstance(node, Num):
            return _Crisp(node.value, DIMENSIONLESS)
        if isinstance(node, Name):
            if node.id in m.params:
                op = _operand(bindings[node.id], f"parameter {node.id}")
            elif node.id in subject.spec:
                op = _operand(subject.spec.value(node.id), f"property {node.id}")
            else:
                raise UnknownProperty(f"{subject.id} has no property {node.id!r}")
            return op if node.index is None else _index(op, node.index, node.id)
        if isinstance(node, BinOp):
            return _binary(node.op, ev(node.left), ev(node.right))
        return _call(node.fn, ev(node.arg))

    return _finish(ev(m.body))


def evaluate_scalar(body: Node, variable: str, x: float) -> float:
    """Evaluate a one-variable expression at a crisp point (unitless)."""
    def ev(node: Node) -> float:
        if isinstance(node, Num):
            return node.value
        if isinstance(node, Name):
            if node.id != variable or node.index is not None:
                raise EvalError(f"unexpected identifier {node.id!r}")
            return x
        if isinstance(node, BinOp):
            return _safe(_OPS[node.op], ev(node.left), ev(node.right))
        fn = {"sin": math.sin, "cos": math.cos, "sqrt": math.sqrt, "neg": operator.neg}[node.fn]
        return _safe(fn, ev(node.arg))

    return ev(body)
