"""NMTL: strict timed until/since, derived operators, the NMITL(0,inf) fragment
and the linear translations to and from ECNTL.

The translations are built from first-occurrence equivalences:

* a strict until bounded above only needs the *first* right-hand witness,
  which is what a predictor clock measures;
* a strict until bounded below needs the *last* witness, marked by
  ``ψ2 ∧ ¬(ψ1 ∧ ○(ψ1 U ψ2))`` so that a predictor clock can find it.

Since and recorder clocks are the mirror image.
"""

from __future__ import annotations

from .formulas import (
    ECNTL_NODES,
    FALSE,
    TRUE,
    Formula,
    FormulaError,
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
    And,
    subformulas,
)
from .logic import Evaluator
from .words import ANY, Interval, TimedWord


def eval_nmtl(word: TimedWord, i: int, f: Formula) -> bool:
    if any(isinstance(g, ECNTL_NODES) for g in subformulas(f)):
        raise FormulaError("not an NMTL formula")
    return Evaluator(word).holds(f, i)


def models_nmtl(word: TimedWord, f: Formula) -> bool:
    return len(word) > 0 and eval_nmtl(word, 0, f)


def derived(op: str, axis: str, interval: Interval, f: Formula) -> Formula:
    """``F``/``G`` (future) and ``P``/``H`` (past) over a timed until/since."""
    if op == "F":
        return TUntil(axis, interval, TRUE, f)
    if op == "G":
        return Not(TUntil(axis, interval, TRUE, Not(f)))
    if op == "P":
        return TSince(axis, interval, TRUE, f)
    if op == "H":
        return Not(TSince(axis, interval, TRUE, Not(f)))
    raise FormulaError(f"unknown derived operator {op!r}")


def in_ints(iv: Interval) -> bool:
    """Nonsingular and either unbounded or left-closed at 0."""
    if iv.undef or iv.hi == iv.lo:
        return False
    return iv.hi is None or (iv.lo == 0 and not iv.lo_open)


def is_nmitl(f: Formula) -> bool:
    for g in subformulas(f):
        if isinstance(g, ECNTL_NODES):
            return False
        if isinstance(g, (TUntil, TSince)) and not in_ints(g.interval):
            return False
    return True


# ---------------------------------------------------------------------------
# NMITL -> ECNTL


def nmitl_to_ecntl(f: Formula) -> Formula:
    if not is_nmitl(f):
        raise FormulaError("not-in-fragment: formula is not in NMITL(0,inf)")
    memo: dict[Formula, Formula] = {}

    def tr(g: Formula) -> Formula:
        out = memo.get(g)
        if out is None:
            out = memo[g] = _to_ecntl(g, tr)
        return out

    return tr(f)


def _to_ecntl(g: Formula, tr) -> Formula:
    if isinstance(g, (TrueF, Prop)):
        return g
    if isinstance(g, Not):
        return Not(tr(g.arg))
    if isinstance(g, Or):
        return Or(tr(g.left), tr(g.right))
    if isinstance(g, (TUntil, TSince)):
        future = isinstance(g, TUntil)
        step, untimed, clock = (Next, Until, NextClock) if future else (Prev, Since, PrevClock)
        a, b, iv, d = tr(g.left), tr(g.right), g.interval, g.axis
        reach = step(d, untimed(d, a, b))
        if iv == ANY:
            return reach
        if iv.hi is not None:
            # upper bound: the nearest witness is the best one
            return And(reach, clock(d, iv, b))
        # lower bound: the farthest witness is the best one
        last = And(b, Not(And(a, reach)))
        return And(reach, clock(d, Interval(iv.lo, None, iv.lo_open, True), last))
    raise FormulaError(f"cannot translate {g!r}")


# ---------------------------------------------------------------------------
# ECNTL -> NMITL


def ecntl_to_nmitl(f: Formula) -> Formula:
    memo: dict[Formula, Formula] = {}

    def tr(g: Formula) -> Formula:
        out = memo.get(g)
        if out is None:
            out = memo[g] = _to_nmitl(g, tr)
        return out

    return tr(f)


def _first(future: bool, axis: str, iv: Interval, arg: Formula) -> Formula:
    """The first occurrence of ``arg`` (strictly ahead or behind) has delay in ``iv``."""
    op = TUntil if future else TSince
    return op(axis, iv, Not(arg), arg)


def _to_nmitl(g: Formula, tr) -> Formula:
    if isinstance(g, (TrueF, Prop)):
        return g
    if isinstance(g, Not):
        return Not(tr(g.arg))
    if isinstance(g, Or):
        return Or(tr(g.left), tr(g.right))
    if isinstance(g, Next):
        return TUntil(g.axis, ANY, FALSE, tr(g.arg))
    if isinstance(g, Prev):
        return TSince(g.axis, ANY, FALSE, tr(g.arg))
    if isinstance(g, (Until, Since)):
        op = TUntil if isinstance(g, Until) else TSince
        a, b = tr(g.left), tr(g.right)
        return Or(b, And(a, op(g.axis, ANY, a, b)))
    if isinstance(g, (TUntil, TSince)):
        # already timed: only the operands need rewriting
        return type(g)(g.axis, g.interval, tr(g.left), tr(g.right))
    if isinstance(g, (NextClock, PrevClock)):
        future = isinstance(g, NextClock)
        a, iv, d = tr(g.arg), g.interval, g.axis
        if iv.undef:
            return Not(_first(future, d, ANY, a))
        lower = _first(future, d, Interval(iv.lo, None, iv.lo_open, True), a)
        if iv.hi is None:
            return lower
        # the first occurrence must not lie beyond the upper end
        beyond = Interval(iv.hi, None, not iv.hi_open, True)
        return And(lower, Not(_first(future, d, beyond, a)))
    raise FormulaError(f"cannot translate {g!r}")
