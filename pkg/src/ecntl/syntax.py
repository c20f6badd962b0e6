"""ASCII concrete syntax: recursive-descent parser and canonical printer.

Grammar, loosest binding first::

    imp    := or ( '->' imp )?
    or     := and ( '|' and )*
    and    := temp ( '&' temp )*
    temp   := prefix ( BINOP temp )?          BINOP: Ug Ua Sg Sa Sc, optionally Ug[I]
    prefix := '!' prefix | Xg/Xa/Pg/Pa/Pc prefix | Ng/Na/Bg/Ba/Bc I prefix | atom
    atom   := 'true' | 'false' | NAME | '(' imp ')'

An interval is written right after its operator, ``[a,b] [a,b) (a,b] (a,b)
[a,inf)``; clock operators also accept the keyword ``undef``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .formulas import (
    FALSE,
    TRUE,
    And,
    Formula,
    FormulaError,
    Implies,
    Next,
    NextClock,
    Not,
    Or,
    Prev,
    PrevClock,
    Prop,
    Since,
    TrueF,
    TSince,
    TUntil,
    Until,
)
from .words import ABSTRACT, CALLER, GLOBAL, Interval, parse_interval

AXIS = {"g": GLOBAL, "a": ABSTRACT, "c": CALLER}
LETTER = {v: k for k, v in AXIS.items()}

_UNARY = {"X": Next, "P": Prev}
_CLOCK = {"N": NextClock, "B": PrevClock}
_BINARY = {"U": (Until, TUntil), "S": (Since, TSince)}
KEYWORDS = {"true", "false", "undef"}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<op>[XPNBUS][a-z](?![A-Za-z0-9_]))
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<interval>[\[(]\s*\d+\s*,\s*(?:\d+|inf)\s*[\])])
  | (?P<punct>[!&|()])
    """,
    re.VERBOSE,
)


class ParseError(FormulaError):
    def __init__(self, msg: str, text: str, offset: int):
        line = text.count("\n", 0, offset) + 1
        col = offset - (text.rfind("\n", 0, offset) + 1) + 1
        super().__init__(f"{line}:{col}: {msg}")
        self.line, self.column = line, col


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int
    glued: bool  # no whitespace before it


def _tokens(text: str) -> list[_Tok]:
    out: list[_Tok] = []
    pos, glued = 0, False
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind == "ws":
            glued = False
        else:
            out.append(_Tok(kind, m.group(), pos, glued))
            glued = True
        pos = m.end()
    out.append(_Tok("eof", "", len(text), False))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokens(text)
        self.k = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.k]

    def fail(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.tok
        raise ParseError(msg, self.text, tok.pos)

    def take(self) -> _Tok:
        t = self.tok
        self.k += 1
        return t

    def expect(self, text: str) -> None:
        if self.tok.text != text:
            self.fail(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        self.k += 1

    def parse(self) -> Formula:
        f = self.imp()
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.tok.text!r}")
        return f

    def imp(self) -> Formula:
        left = self.disj()
        if self.tok.kind == "arrow":
            self.take()
            return Implies(left, self.imp())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.tok.text == "|":
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.temporal()
        while self.tok.text == "&":
            self.take()
            left = And(left, self.temporal())
        return left

    def _axis(self, tok: _Tok, allowed: str) -> str:
        letter = tok.text[1]
        if letter not in allowed:
            self.fail(f"operator {tok.text} does not exist (no {AXIS.get(letter, letter)} variant)", tok)
        return AXIS[letter]

    def _interval(self, required: bool, allow_undef: bool) -> Interval | None:
        t = self.tok
        if t.kind == "interval" and t.glued:
            self.take()
            try:
                return parse_interval(t.text)
            except ValueError as exc:
                self.fail(str(exc), t)
        if allow_undef and t.text == "undef":
            self.take()
            return parse_interval("undef")
        if required:
            self.fail("expected an interval")
        return None

    def temporal(self) -> Formula:
        left = self.prefix()
        t = self.tok
        if t.kind == "op" and t.text[0] in _BINARY:
            self.take()
            untimed, timed = _BINARY[t.text[0]]
            axis = self._axis(t, "ga" if t.text[0] == "U" else "gac")
            interval = self._interval(required=False, allow_undef=False)
            right = self.temporal()
            if interval is None:
                return untimed(axis, left, right)
            return timed(axis, interval, left, right)
        return left

    def prefix(self) -> Formula:
        t = self.tok
        if t.text == "!":
            self.take()
            return Not(self.prefix())
        if t.kind == "op" and t.text[0] in _UNARY:
            self.take()
            axis = self._axis(t, "ga" if t.text[0] == "X" else "gac")
            return _UNARY[t.text[0]](axis, self.prefix())
        if t.kind == "op" and t.text[0] in _CLOCK:
            self.take()
            axis = self._axis(t, "ga" if t.text[0] == "N" else "gac")
            interval = self._interval(required=True, allow_undef=True)
            return _CLOCK[t.text[0]](axis, interval, self.prefix())
        return self.atom()

    def atom(self) -> Formula:
        t = self.tok
        if t.text == "(":
            self.take()
            f = self.imp()
            self.expect(")")
            return f
        if t.kind == "name":
            self.take()
            if t.text == "true":
                return TRUE
            if t.text == "false":
                return FALSE
            if t.text in KEYWORDS:
                self.fail(f"keyword {t.text!r} is not a formula", t)
            return Prop(t.text)
        if t.kind == "op":
            self.fail(f"operator {t.text} needs a left operand", t)
        self.fail(f"expected a formula, found {t.text or 'end of input'!r}")


def parse(text: str) -> Formula:
    """Parse ECNTL or NMTL concrete syntax."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printer


def _is_and(f: Formula) -> bool:
    return (
        isinstance(f, Not)
        and isinstance(f.arg, Or)
        and isinstance(f.arg.left, Not)
        and isinstance(f.arg.right, Not)
    )


def _text(f: Formula, top: bool) -> str:
    def wrap(s: str) -> str:
        return s if top else f"({s})"

    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, Prop):
        return f.name
    if f == FALSE:
        return "false"
    if _is_and(f):
        return wrap(f"{_text(f.arg.left.arg, False)} & {_text(f.arg.right.arg, False)}")
    if isinstance(f, Not):
        return "!" + _text(f.arg, False)
    if isinstance(f, Or):
        if isinstance(f.left, Not) and f.left != FALSE:
            return wrap(f"{_text(f.left.arg, False)} -> {_text(f.right, False)}")
        return wrap(f"{_text(f.left, False)} | {_text(f.right, False)}")
    if isinstance(f, (Next, Prev)):
        op = "X" if isinstance(f, Next) else "P"
        return f"{op}{LETTER[f.axis]} {_text(f.arg, False)}"
    if isinstance(f, (NextClock, PrevClock)):
        op = "N" if isinstance(f, NextClock) else "B"
        iv = " undef" if f.interval.undef else str(f.interval)
        return f"{op}{LETTER[f.axis]}{iv} {_text(f.arg, False)}"
    if isinstance(f, (Until, Since)):
        op = "U" if isinstance(f, Until) else "S"
        return wrap(f"{_text(f.left, False)} {op}{LETTER[f.axis]} {_text(f.right, False)}")
    if isinstance(f, (TUntil, TSince)):
        op = "U" if isinstance(f, TUntil) else "S"
        return wrap(f"{_text(f.left, False)} {op}{LETTER[f.axis]}{f.interval} {_text(f.right, False)}")
    raise TypeError(f"not a formula: {f!r}")


def to_text(f: Formula) -> str:
    """Canonical text; ``parse(to_text(f)) == f``."""
    return _text(f, True)
