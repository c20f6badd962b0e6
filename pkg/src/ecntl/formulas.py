"""Abstract syntax shared by ECNTL and NMTL.

Both logics share the propositional core.  ECNTL adds untimed next/prev,
non-strict until/since and the event-clock modalities; NMTL adds strict
interval-decorated until/since.  Conjunction, implication and the usual
eventually/always macros are sugar over ``Or``/``Not``.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, fields
from functools import lru_cache
from typing import Iterator

from .words import ABSTRACT, CALLER, GLOBAL, Interval

FUTURE_AXES = (GLOBAL, ABSTRACT)
PAST_AXES = (GLOBAL, ABSTRACT, CALLER)


class FormulaError(ValueError):
    pass


_INTERN: "weakref.WeakValueDictionary[tuple, Formula]" = weakref.WeakValueDictionary()
_FIELD_NAMES: dict[type, tuple[str, ...]] = {}


class Formula:
    """Immutable, hash-consed node.

    Constructing a node equal to an existing one returns the existing
    object, so structural equality is identity and hashing is cheap.
    """

    def __new__(cls, *args, **kw):
        names = _FIELD_NAMES.get(cls)
        if names is None:
            names = _FIELD_NAMES[cls] = tuple(f.name for f in fields(cls))
        key = (cls, tuple(args) + tuple(kw[n] for n in names[len(args):]))
        obj = _INTERN.get(key)
        if obj is None:
            obj = object.__new__(cls)
            cls.__init__(obj, *args, **kw)  # validates before registering
            _INTERN[key] = obj
        return obj

    def __reduce__(self):
        return (type(self), tuple(getattr(self, n) for n in _FIELD_NAMES[type(self)]))

    def __str__(self) -> str:
        from .syntax import to_text

        return to_text(self)

    def children(self) -> tuple["Formula", ...]:
        return ()

    # sugar, so tests and generators read naturally
    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)

    def __rshift__(self, other: "Formula") -> "Formula":
        return Implies(self, other)


def _check_axis(axis: str, allowed: tuple[str, ...], what: str) -> None:
    if axis not in allowed:
        raise FormulaError(f"{what} does not take the {axis} axis")


@dataclass(frozen=True, eq=False)
class TrueF(Formula):
    pass


@dataclass(frozen=True, eq=False)
class Prop(Formula):
    name: str


@dataclass(frozen=True, eq=False)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False)
class Not(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, eq=False)
class Next(Formula):
    axis: str
    arg: Formula

    def __post_init__(self):
        _check_axis(self.axis, FUTURE_AXES, "next")

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, eq=False)
class Prev(Formula):
    axis: str
    arg: Formula

    def __post_init__(self):
        _check_axis(self.axis, PAST_AXES, "prev")

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, eq=False)
class Until(Formula):
    axis: str
    left: Formula
    right: Formula

    def __post_init__(self):
        _check_axis(self.axis, FUTURE_AXES, "until")

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False)
class Since(Formula):
    axis: str
    left: Formula
    right: Formula

    def __post_init__(self):
        _check_axis(self.axis, PAST_AXES, "since")

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False)
class NextClock(Formula):
    """Delay to the next position (on the axis path) where ``arg`` holds lies in ``interval``."""

    axis: str
    interval: Interval
    arg: Formula

    def __post_init__(self):
        _check_axis(self.axis, FUTURE_AXES, "predictor clock")

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, eq=False)
class PrevClock(Formula):
    axis: str
    interval: Interval
    arg: Formula

    def __post_init__(self):
        _check_axis(self.axis, PAST_AXES, "recorder clock")

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, eq=False)
class TUntil(Formula):
    """NMTL strict timed until."""

    axis: str
    interval: Interval
    left: Formula
    right: Formula

    def __post_init__(self):
        _check_axis(self.axis, FUTURE_AXES, "timed until")
        if self.interval.undef:
            raise FormulaError("timed until needs a real interval")

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False)
class TSince(Formula):
    axis: str
    interval: Interval
    left: Formula
    right: Formula

    def __post_init__(self):
        _check_axis(self.axis, PAST_AXES, "timed since")
        if self.interval.undef:
            raise FormulaError("timed since needs a real interval")

    def children(self):
        return (self.left, self.right)


TRUE = TrueF()
FALSE = Not(TRUE)

ECNTL_NODES = (Next, Prev, Until, Since, NextClock, PrevClock)
NMTL_NODES = (TUntil, TSince)
CLOCK_NODES = (NextClock, PrevClock)


def And(a: Formula, b: Formula) -> Formula:
    return Not(Or(Not(a), Not(b)))


def Implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def neg(f: Formula) -> Formula:
    """Negation with double negations cancelled."""
    return f.arg if isinstance(f, Not) else Not(f)


def conj(*items: Formula) -> Formula:
    items = [f for f in items if f != TRUE]
    if not items:
        return TRUE
    out = items[-1]
    for f in reversed(items[:-1]):
        out = And(f, out)
    return out


def disj(*items: Formula) -> Formula:
    items = [f for f in items if f != FALSE]
    if not items:
        return FALSE
    out = items[-1]
    for f in reversed(items[:-1]):
        out = Or(f, out)
    return out


def Eventually(axis: str, f: Formula) -> Formula:
    """Non-strict ECNTL eventually."""
    return Until(axis, TRUE, f)


def Always(axis: str, f: Formula) -> Formula:
    return Not(Eventually(axis, Not(f)))


def props(*names: str) -> tuple[Prop, ...]:
    return tuple(Prop(n) for n in names)


# ---------------------------------------------------------------------------
# traversal and measures


def walk(f: Formula) -> Iterator[Formula]:
    """Pre-order over all nodes (repeats shared subtrees)."""
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


@lru_cache(maxsize=8192)
def subformulas(f: Formula) -> tuple[Formula, ...]:
    """Distinct subformulas, children before parents."""
    seen: dict[Formula, None] = {}

    def visit(g: Formula) -> None:
        if g in seen:
            return
        for c in g.children():
            visit(c)
        seen[g] = None

    visit(f)
    return tuple(seen)


def size(f: Formula) -> int:
    """Number of distinct subformulas."""
    return len(subformulas(f))


def prop_names(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Prop))


def intervals(f: Formula) -> list[Interval]:
    return [g.interval for g in subformulas(f) if hasattr(g, "interval")]


def logic_of(f: Formula) -> str:
    """``"ecntl"``, ``"nmtl"``, ``"both"`` (purely propositional) or ``"mixed"``."""
    nodes = subformulas(f)
    e = any(isinstance(g, ECNTL_NODES) for g in nodes)
    m = any(isinstance(g, NMTL_NODES) for g in nodes)
    if e and m:
        return "mixed"
    return "ecntl" if e else "nmtl" if m else "both"


@dataclass(frozen=True)
class FormulaMetrics:
    size: int
    constants: frozenset[int]
    recursive: bool


def metrics(f: Formula) -> FormulaMetrics:
    consts: set[int] = set()
    recursive = False
    for g in subformulas(f):
        if hasattr(g, "interval"):
            consts |= g.interval.constants()
        if isinstance(g, CLOCK_NODES) and not isinstance(g.arg, Prop):
            recursive = True
    return FormulaMetrics(size(f), frozenset(consts), recursive)
