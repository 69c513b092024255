"""Method expressions: grammar, AST, printing and alpha-equivalence.

Grammar (whitespace is insignificant)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" unary)?              # right-associative
    atom    := NUMBER
             | FUNC "(" expr ")"              # FUNC in sin, cos, sqrt, neg
             | IDENT ("[" INTEGER "]")?
             | "(" expr ")"

    guard   := check (("and" | "&") check)*
    check   := IDENT "=" NUMBER

Identifiers that are declared parameters of a method are parameter
references; every other identifier refers to a property of the subject.
A leading minus parses as ``neg(...)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import InvariantError, ParseError

FUNCTIONS = ("sin", "cos", "sqrt", "neg")
BINARY_OPS = ("+", "-", "*", "/", "^")
KINDS = ("exploiter", "modifier")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Name:
    id: str
    index: int | None = None


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Node"


Node = Union[Num, Name, BinOp, Call]


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()\[\]=&])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str  # number, ident, op, eof
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        for i, ch in enumerate(m.group()):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        if not text.strip():
            raise ParseError("empty expression", 1, 1, frozenset({"expression"}))
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def _fail(self, expected: set[str]):
        tok = self.cur
        got = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(f"unexpected {got}", tok.line, tok.col, frozenset(expected))

    def _at(self, text: str) -> bool:
        return self.cur.kind == "op" and self.cur.text == text

    def _expect(self, text: str):
        if not self._at(text):
            self._fail({text})
        self.i += 1

    def finish(self):
        if self.cur.kind != "eof":
            self._fail({"end of input", "operator"})

    def expr(self) -> Node:
        node = self.term()
        while self._at("+") or self._at("-"):
            op = self.cur.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self._at("*") or self._at("/"):
            op = self.cur.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self._at("-"):
            self.i += 1
            return Call("neg", self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self._at("^"):
            self.i += 1
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        tok = self.cur
        if tok.kind == "number":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "ident":
            self.i += 1
            if tok.text in FUNCTIONS:
                self._expect("(")
                arg = self.expr()
                self._expect(")")
                return Call(tok.text, arg)
            if self._at("["):
                self.i += 1
                idx = self.cur
                if idx.kind != "number" or not idx.text.isdigit():
                    self._fail({"integer index"})
                self.i += 1
                self._expect("]")
                return Name(tok.text, int(idx.text))
            return Name(tok.text)
        if self._at("("):
            self.i += 1
            node = self.expr()
            self._expect(")")
            return node
        self._fail({"number", "identifier", "(", "-"})

    def guard(self) -> "Guard":
        checks = [self.check()]
        while (self.cur.kind == "ident" and self.cur.text == "and") or self._at("&"):
            self.i += 1
            checks.append(self.check())
        return Guard(tuple(checks))

    def check(self) -> tuple[str, float]:
        tok = self.cur
        if tok.kind != "ident" or tok.text in FUNCTIONS or tok.text == "and":
            self._fail({"property name"})
        self.i += 1
        self._expect("=")
        num = self.cur
        if num.kind != "number":
            self._fail({"number"})
        self.i += 1
        return (tok.text, float(num.text))


def parse_expr(text: str) -> Node:
    p = _Parser(text)
    node = p.expr()
    p.finish()
    return node


# precedence levels used by the printer
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}
_ATOM = 5


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Call) and node.fn == "neg":
        return _PREC["neg"]
    return _ATOM


def _num(x: float) -> str:
    text = repr(float(x))
    return text[:-2] if text.endswith(".0") else text


def to_source(node: Node) -> str:
    """Print with the minimum parentheses needed to parse back to ``node``."""
    if isinstance(node, Num):
        return _num(node.value)
    if isinstance(node, Name):
        return node.id if node.index is None else f"{node.id}[{node.index}]"
    if isinstance(node, Call):
        if node.fn == "neg":
            inner = to_source(node.arg)
            return "-" + (inner if _prec(node.arg) >= 3 else f"({inner})")
        return f"{node.fn}({to_source(node.arg)})"
    p = _PREC[node.op]
    left, right = to_source(node.left), to_source(node.right)
    if node.op == "^":
        if _prec(node.left) < _ATOM:
            left = f"({left})"
        if _prec(node.right) < 3:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(node.left) < p:
        left = f"({left})"
    if _prec(node.right) <= p:
        right = f"({right})"
    return f"{left} {node.op} {right}" if p == 1 else f"{left}*{right}" if node.op == "*" else f"{left}/{right}"


def walk(node: Node) -> Iterator[Node]:
    yield node
    if isinstance(node, BinOp):
        yield from walk(node.left)
        yield from walk(node.right)
    elif isinstance(node, Call):
        yield from walk(node.arg)


def names(node: Node) -> list[str]:
    """Distinct identifiers in first-occurrence order."""
    seen = []
    for n in walk(node):
        if isinstance(n, Name) and n.id not in seen:
            seen.append(n.id)
    return seen


def rename(node: Node, mapping: dict[str, str]) -> Node:
    if isinstance(node, Name):
        return Name(mapping.get(node.id, node.id), node.index)
    if isinstance(node, BinOp):
        return BinOp(node.op, rename(node.left, mapping), rename(node.right, mapping))
    if isinstance(node, Call):
        return Call(node.fn, rename(node.arg, mapping))
    return node


@dataclass(frozen=True)
class Guard:
    """Conjunction of ``property = degree`` checks."""

    checks: tuple[tuple[str, float], ...]

    def __str__(self) -> str:
        return " and ".join(f"{name} = {_num(deg)}" for name, deg in self.checks)

    @property
    def properties(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.checks)


def parse_guard(text: str) -> Guard:
    p = _Parser(text)
    g = p.guard()
    p.finish()
    return g


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class MethodDef:
    name: str
    params: tuple[str, ...]
    body: Node
    guard: Guard | None = None
    kind: str = "exploiter"

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        if not _IDENT.match(self.name or ""):
            raise InvariantError(f"bad method name {self.name!r}")
        for p in self.params:
            if not _IDENT.match(p) or p in FUNCTIONS:
                raise InvariantError(f"bad parameter name {p!r}")
        if len(set(self.params)) != len(self.params):
            raise InvariantError(f"duplicate parameters in {self.name}")
        if self.kind not in KINDS:
            raise InvariantError(f"method kind must be one of {KINDS}, got {self.kind!r}")

    def property_refs(self) -> list[str]:
        return [n for n in names(self.body) if n not in self.params]

    def __str__(self) -> str:
        text = f"{self.name}({', '.join(self.params)}) = {to_source(self.body)}"
        return text + (f" when {self.guard}" if self.guard else "")


def method(name: str, params, body: str, guard: str | None = None,
           kind: str = "exploiter") -> MethodDef:
    """Convenience constructor taking source text."""
    return MethodDef(name, tuple(params), parse_expr(body),
                     parse_guard(guard) if guard else None, kind)


def alpha_equivalent(a: MethodDef, b: MethodDef) -> bool:
    """Structural equality up to positional renaming of parameters.

    Method names are ignored.
    """
    if a.kind != b.kind or a.guard != b.guard:
        return False
    canon_a = rename(a.body, {p: f"#{i}" for i, p in enumerate(a.params)})
    canon_b = rename(b.body, {p: f"#{i}" for i, p in enumerate(b.params)})
    return canon_a == canon_b
