"""Exception hierarchy.

Domain errors (exit code 1 in the CLI) derive from ``DomainError``; malformed
input documents and expressions derive from ``FormatError`` (exit code 2).
"""

from __future__ import annotations


class FoodnetError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FoodnetError):
    pass


class FormatError(FoodnetError):
    pass


# fuzzy-core

class InvariantError(DomainError, ValueError):
    """A value type was constructed in violation of its invariants."""


class EmptySet(InvariantError):
    pass


class BadDegree(InvariantError):
    pass


class BadExponent(DomainError, ValueError):
    pass


class EvalError(DomainError):
    pass


class UnitError(EvalError):
    pass


# knowledge-model

class KindMismatch(DomainError, TypeError):
    pass


class UnknownProperty(DomainError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class UnknownObject(DomainError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class UnknownClass(DomainError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class ArityMismatch(DomainError, ValueError):
    pass


# expression-engine

class ParseError(FormatError):
    def __init__(self, message: str, line: int = 1, column: int = 1,
                 expected: frozenset[str] | None = None):
        self.line = line
        self.column = column
        self.expected = frozenset(expected or ())
        detail = f"{message} at line {line}, column {column}"
        if self.expected:
            detail += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(detail)


class GuardFailed(EvalError):
    pass


class MultiFuzzyOperands(EvalError):
    pass


class UnboundParameter(EvalError):
    pass


# class-algebra

class DuplicateId(DomainError):
    pass


class IdCollision(DomainError):
    pass


class EmptyCore(DomainError):
    pass


class EmptyResult(DomainError):
    pass


# modifier-engine

class ReflectionViolation(DomainError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class UnknownTarget(DomainError):
    pass


class KindViolation(DomainError):
    pass


# persistence

class SchemaError(FormatError):
    def __init__(self, message: str, path: str = "$"):
        self.path = path
        super().__init__(f"{path}: {message}")


class ValidationError(FormatError):
    def __init__(self, message: str, path: str = "$"):
        self.path = path
        super().__init__(f"{path}: {message}")
