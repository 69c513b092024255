"""Discrete type-1 and type-2 fuzzy sets.

A type-1 set is a finite, value-sorted collection of ``value/membership``
pairs.  A type-2 set attaches to every primary value a *grade set*: a type-1
set whose values are themselves membership degrees.  Both are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Union

from .errors import BadDegree, BadExponent, EmptySet, EvalError, InvariantError

#: Absolute tolerance used wherever degrees, values or spacings are compared.
TOL = 1e-9


def _check_degree(mu: float, what: str = "membership") -> float:
    if isinstance(mu, bool) or not isinstance(mu, (int, float)):
        raise BadDegree(f"{what} must be a number, got {mu!r}")
    if math.isnan(mu) or not 0.0 <= mu <= 1.0:
        raise BadDegree(f"{what} {mu!r} outside [0, 1]")
    return float(mu)


def _check_scalar(v: float) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise InvariantError(f"value must be a finite number, got {v!r}")
    return float(v)


def close(a: float, b: float, tol: float = TOL) -> bool:
    return abs(a - b) <= tol


@dataclass(frozen=True, order=True)
class Degree:
    """A truth degree in [0, 1]."""

    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", _check_degree(self.value, "degree"))

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class Type1FuzzySet:
    elements: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.elements:
            raise EmptySet("a fuzzy set needs at least one element")
        checked = []
        prev = None
        for v, mu in self.elements:
            v = _check_scalar(v)
            mu = _check_degree(mu)
            if prev is not None and v <= prev:
                raise InvariantError("values must be strictly increasing")
            prev = v
            checked.append((v, mu))
        object.__setattr__(self, "elements", tuple(checked))

    def __iter__(self) -> Iterator[tuple[float, float]]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for v, _ in self.elements)

    @property
    def memberships(self) -> tuple[float, ...]:
        return tuple(mu for _, mu in self.elements)

    def height(self) -> float:
        return max(self.memberships)

    def approx_eq(self, other: "Type1FuzzySet", tol: float = TOL) -> bool:
        return len(self) == len(other) and all(
            close(v, w, tol) and close(m, n, tol)
            for (v, m), (w, n) in zip(self.elements, other.elements))

    def __str__(self) -> str:
        from .notation import render_set
        return render_set(self)


@dataclass(frozen=True)
class Type2FuzzySet:
    elements: tuple[tuple[float, Type1FuzzySet], ...]

    def __post_init__(self):
        if not self.elements:
            raise EmptySet("a fuzzy set needs at least one element")
        checked = []
        prev = None
        for v, grades in self.elements:
            v = _check_scalar(v)
            if not isinstance(grades, Type1FuzzySet):
                raise InvariantError(f"grade set for {v} must be a type-1 fuzzy set")
            for g in grades.values:
                _check_degree(g, "grade value")
            if prev is not None and v <= prev:
                raise InvariantError("primary values must be strictly increasing")
            prev = v
            checked.append((v, grades))
        object.__setattr__(self, "elements", tuple(checked))

    def __iter__(self) -> Iterator[tuple[float, Type1FuzzySet]]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for v, _ in self.elements)

    @property
    def grade_sets(self) -> tuple[Type1FuzzySet, ...]:
        return tuple(g for _, g in self.elements)

    def principal(self) -> Type1FuzzySet:
        """Collapse to a type-1 set.

        Each primary value keeps the grade with the highest secondary
        membership (the larger grade on ties), so a default-lifted set
        collapses back to the set it was lifted from.
        """
        pairs = []
        for v, grades in self.elements:
            best = max(grades.elements, key=lambda e: (e[1], e[0]))
            pairs.append((v, best[0]))
        return Type1FuzzySet(tuple(pairs))

    def approx_eq(self, other: "Type2FuzzySet", tol: float = TOL) -> bool:
        return len(self) == len(other) and all(
            close(v, w, tol) and g.approx_eq(h, tol)
            for (v, g), (w, h) in zip(self.elements, other.elements))

    def __str__(self) -> str:
        from .notation import render_set
        return render_set(self)


FuzzySet = Union[Type1FuzzySet, Type2FuzzySet]


def make_type1(pairs: Iterable[tuple[float, float]], strict: bool = False) -> Type1FuzzySet:
    """Build a type-1 set from unordered pairs.

    Values closer than ``TOL`` are duplicates; they merge by maximum
    membership, or raise ``InvariantError`` when ``strict`` is set.
    """
    pairs = [(_check_scalar(v), _check_degree(mu)) for v, mu in pairs]
    if not pairs:
        raise EmptySet("a fuzzy set needs at least one element")
    pairs.sort(key=lambda p: p[0])
    merged: list[list[float]] = []
    for v, mu in pairs:
        if merged and v - merged[-1][0] <= TOL:
            if strict:
                raise InvariantError(f"duplicate value {v}")
            merged[-1][1] = max(merged[-1][1], mu)
        else:
            merged.append([v, mu])
    return Type1FuzzySet(tuple((v, mu) for v, mu in merged))


def make_type2(pairs: Iterable[tuple[float, Type1FuzzySet]], strict: bool = False) -> Type2FuzzySet:
    """Build a type-2 set; colliding primaries merge their grade sets pointwise by max."""
    pairs = [(_check_scalar(v), g) for v, g in pairs]
    if not pairs:
        raise EmptySet("a fuzzy set needs at least one element")
    pairs.sort(key=lambda p: p[0])
    merged: list[list] = []
    for v, g in pairs:
        if merged and v - merged[-1][0] <= TOL:
            if strict:
                raise InvariantError(f"duplicate value {v}")
            merged[-1][1] = make_type1(merged[-1][1].elements + g.elements)
        else:
            merged.append([v, g])
    return Type2FuzzySet(tuple((v, g) for v, g in merged))


def lift(s: Type1FuzzySet, grade_sets: list[Type1FuzzySet] | None = None) -> Type2FuzzySet:
    """Turn a type-1 set into a type-2 one.

    Without explicit grade sets each membership ``mu`` becomes the singleton
    grade set ``{mu/1}``.
    """
    if grade_sets is None:
        grade_sets = [Type1FuzzySet(((mu, 1.0),)) for mu in s.memberships]
    if len(grade_sets) != len(s):
        from .errors import ArityMismatch
        raise ArityMismatch(f"{len(grade_sets)} grade sets for {len(s)} values")
    return Type2FuzzySet(tuple(zip(s.values, grade_sets)))


def _apply(f: Callable[[float], float], v: float) -> float:
    try:
        out = f(v)
    except (ArithmeticError, ValueError, TypeError) as exc:
        raise EvalError(f"cannot evaluate at {v}: {exc}") from exc
    if isinstance(out, complex) or not math.isfinite(out):
        raise EvalError(f"non-finite result at {v}")
    return float(out)


def map_unary(s: Type1FuzzySet, f: Callable[[float], float]) -> Type1FuzzySet:
    return make_type1((_apply(f, v), mu) for v, mu in s)


def map_unary_type2(s: Type2FuzzySet, f: Callable[[float], float]) -> Type2FuzzySet:
    return make_type2((_apply(f, v), g) for v, g in s)


def _check_exponent(k: int) -> int:
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise BadExponent(f"exponent must be a positive integer, got {k!r}")
    return k


def _reshape(x, fn: Callable[[float], float]):
    if isinstance(x, Degree):
        return Degree(fn(x.value))
    if isinstance(x, Type1FuzzySet):
        return Type1FuzzySet(tuple((v, fn(mu)) for v, mu in x))
    if isinstance(x, Type2FuzzySet):
        # primary memberships of a type-2 set are the values of its grade sets
        return Type2FuzzySet(tuple(
            (v, make_type1((fn(g), s) for g, s in grades)) for v, grades in x))
    raise TypeError(f"expected Degree or fuzzy set, got {type(x).__name__}")


def dilution(x, k: int):
    """Raise every membership to the power ``1/k``."""
    k = _check_exponent(k)
    if k == 1:
        return x
    return _reshape(x, lambda mu: mu ** (1.0 / k))


def concentration(x, n: int):
    """Raise every membership to the power ``n``."""
    n = _check_exponent(n)
    return _reshape(x, lambda mu: mu ** n)
