"""Rendering and parsing of the ``v/mu + v/mu`` notation for fuzzy values."""

from __future__ import annotations

import re

from .errors import ParseError
from .fuzzy import Type1FuzzySet, Type2FuzzySet, make_type1, make_type2


def fmt_number(x: float) -> str:
    """At most nine fractional digits, no trailing zeros, no ``-0``."""
    text = f"{x:.9f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def render_set(s) -> str:
    if isinstance(s, Type2FuzzySet):
        return "{" + " + ".join(f"{fmt_number(v)}/{render_set(g)}" for v, g in s) + "}"
    return "{" + " + ".join(f"{fmt_number(v)}/{fmt_number(mu)}" for v, mu in s) + "}"


def _with_unit(text: str, unit: str) -> str:
    return f"{text}, {unit}" if unit else text


def render_value(value) -> str:
    from . import model as m

    if isinstance(value, m.Verification):
        return fmt_number(value.degree.value)
    if isinstance(value, m.CrispScalar):
        return _with_unit(fmt_number(value.value), value.unit)
    if isinstance(value, m.CrispTuple):
        return _with_unit("(" + ", ".join(fmt_number(v) for v in value.values) + ")", value.unit)
    if isinstance(value, (m.Fuzzy1, m.Fuzzy2)):
        return _with_unit(render_set(value.set), value.unit)
    if isinstance(value, m.TupleOfFuzzy):
        return _with_unit("(" + ", ".join(render_set(c) for c in value.components) + ")", value.unit)
    raise TypeError(f"not a property value: {value!r}")


_TOKEN = re.compile(r"\s*(?:(?P<num>-?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)|(?P<sym>[{}/+,]))")


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _fail(self, msg: str, expected: set[str]):
        raise ParseError(msg, 1, self.pos + 1, frozenset(expected))

    def peek(self) -> str | None:
        m = _TOKEN.match(self.text, self.pos)
        if not m:
            return None
        return m.group("sym") or "number"

    def take(self, kind: str) -> str:
        m = _TOKEN.match(self.text, self.pos)
        got = m and (m.group("sym") or "number")
        if got != kind:
            self._fail(f"unexpected input {self.text[self.pos:self.pos + 8]!r}", {kind})
        self.pos = m.end()
        return m.group("num") or m.group("sym")

    def fuzzy_set(self):
        self.take("{")
        pairs = []
        while True:
            v = float(self.take("number"))
            self.take("/")
            if self.peek() == "{":
                pairs.append((v, self.fuzzy_set()))
            else:
                pairs.append((v, float(self.take("number"))))
            nxt = self.peek()
            if nxt == "}":
                self.take("}")
                break
            if nxt not in ("+", ","):
                self._fail("unterminated fuzzy set", {"+", ",", "}"})
            self.take(nxt)
        kinds = {isinstance(g, Type1FuzzySet) for _, g in pairs}
        if len(kinds) > 1:
            self._fail("mixed type-1 and type-2 elements", set())
        if kinds == {True}:
            return make_type2(pairs)
        return make_type1(pairs)


def parse_fuzzy_literal(text: str):
    """Parse ``{v/mu + ...}`` with an optional trailing ``, unit``.

    Returns a ``Fuzzy1`` or ``Fuzzy2`` property value.  Type-2 elements nest
    a grade set in braces, e.g. ``{2.9/{0.8/0.9 + 0.95/1}}``.
    """
    from .model import Fuzzy1, Fuzzy2

    reader = _Reader(text)
    s = reader.fuzzy_set()
    rest = text[reader.pos:].strip()
    if rest.startswith(","):
        rest = rest[1:].strip()
    if isinstance(s, Type2FuzzySet):
        return Fuzzy2(s, rest)
    return Fuzzy1(s, rest)
