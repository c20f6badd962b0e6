"""Pointwise semantics of ECNTL and NMTL over finite timed words, and the ECNTL closure.

The evaluator is the ground truth for everything else in the package, so
each clause is a direct scan over the positions named by the semantics
rather than a fixpoint unwinding.
"""

from __future__ import annotations

from functools import lru_cache

from .formulas import (
    NMTL_NODES,
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
    neg,
    prop_names,
    subformulas,
)
from .words import ABSTRACT, CALLER, PINF, RESERVED, Interval, Nesting, TimedWord, skeleton


@lru_cache(maxsize=None)
def is_timed(f: Formula) -> bool:
    """Whether the truth of ``f`` can depend on timestamps."""
    return isinstance(f, (NextClock, PrevClock, TUntil, TSince)) or any(is_timed(g) for g in f.children())


class Evaluator:
    """Truth tables of formulas over one timed word, memoised per subformula.

    ``shared`` may hold truth tables computed for other words with the same
    symbols; it is read and filled in place.  Timestamp-free formulas are
    stored under the formula itself, timed ones under the formula and the
    stamps relative to the first, since only delays matter.
    """

    def __init__(self, word: TimedWord, shared: dict | None = None):
        self.word = word
        self._shared = shared
        self.symbols = word.symbols
        self.stamps = word.stamps
        self.nest: Nesting = skeleton(word.symbols) if len(word) else Nesting(())
        self.n = len(word)
        self._memo: dict[Formula, tuple[bool, ...]] = {}
        self._delays: dict[tuple[int, int, int], bool] = {}
        self._shape = 0
        if shared is not None and self.n:
            # intern the relative stamps once; hashing Fractions per lookup is slow
            shape = tuple(t - self.stamps[0] for t in self.stamps)
            self._shape = shared.get(shape)
            if self._shape is None:
                self._shape = shared[shape] = len(shared)

    def holds(self, f: Formula, i: int) -> bool:
        if not 0 <= i < self.n:
            raise IndexError(f"position {i} out of range for length {self.n}")
        return self.truth(f)[i]

    def truth(self, f: Formula) -> tuple[bool, ...]:
        t = self._memo.get(f)
        if t is None:
            shared = self._shared
            if shared is None:
                t = self._compute(f)
            else:
                key = (f, self._shape) if is_timed(f) else f
                t = shared.get(key)
                if t is None:
                    t = shared[key] = self._compute(f)
            self._memo[f] = t
        return t

    # -- clauses -----------------------------------------------------------

    def _compute(self, f: Formula) -> tuple[bool, ...]:
        clause = _CLAUSES.get(type(f))
        if clause is None:
            raise FormulaError(f"cannot evaluate {f!r}")
        return clause(self, f)

    def _true(self, f: TrueF) -> tuple[bool, ...]:
        return (True,) * self.n

    def _prop(self, f: Prop) -> tuple[bool, ...]:
        if f.name == PINF:
            return self.nest.pinf
        name = f.name
        return tuple(name in s for s in self.symbols)

    def _not(self, f: Not) -> tuple[bool, ...]:
        return tuple(not v for v in self.truth(f.arg))

    def _or(self, f: Or) -> tuple[bool, ...]:
        a, b = self.truth(f.left), self.truth(f.right)
        return tuple(x or y for x, y in zip(a, b))

    def _next(self, f: Next) -> tuple[bool, ...]:
        a, nest = self.truth(f.arg), self.nest
        out = []
        for i in range(self.n):
            j = nest.succ(f.axis, i)
            out.append(j is not None and j > i and a[j])
        return tuple(out)

    def _untimed(self, f) -> tuple[bool, ...]:
        a, b = self.truth(f.left), self.truth(f.right)
        scan = self.nest.later if isinstance(f, Until) else self.nest.earlier
        out = []
        for i in range(self.n):
            ok = b[i]
            if not ok and a[i]:
                # nearest first: stop at the first position where the left side fails
                for j in scan(f.axis, i):
                    if b[j]:
                        ok = True
                        break
                    if not a[j]:
                        break
            out.append(ok)
        return tuple(out)

    def _within(self, iv: Interval, i: int, j: int) -> bool:
        key = (id(iv), i, j)  # intervals live as long as their formulas
        v = self._delays.get(key)
        if v is None:
            v = self._delays[key] = abs(self.stamps[j] - self.stamps[i]) in iv
        return v

    def _prev(self, f: Prev) -> tuple[bool, ...]:
        a, nest = self.truth(f.arg), self.nest
        if f.axis == CALLER:
            back = nest.caller
        elif f.axis == ABSTRACT:
            back = nest.abs_prev
        else:
            back = (None, *range(self.n - 1))
        return tuple(j is not None and a[j] for j in back)

    def _clock(self, f) -> tuple[bool, ...]:
        """First occurrence of the argument along the path, then the delay test.

        With the ``undef`` interval the formula holds exactly when no such
        occurrence exists, matching the event-clock reading of the guard.
        """
        a = self.truth(f.arg)
        scan = self.nest.later if isinstance(f, NextClock) else self.nest.earlier
        iv = f.interval
        out = []
        for i in range(self.n):
            first = next((j for j in scan(f.axis, i) if a[j]), None)
            if first is None:
                out.append(iv.undef)
            else:
                out.append(self._within(iv, i, first))
        return tuple(out)

    def _timed(self, f) -> tuple[bool, ...]:
        a, b = self.truth(f.left), self.truth(f.right)
        scan = self.nest.later if isinstance(f, TUntil) else self.nest.earlier
        iv = f.interval
        out = []
        for i in range(self.n):
            ok = False
            for j in scan(f.axis, i):
                if b[j] and self._within(iv, i, j):
                    ok = True
                    break
                if not a[j]:
                    break
            out.append(ok)
        return tuple(out)


_CLAUSES = {
    TrueF: Evaluator._true,
    Prop: Evaluator._prop,
    Not: Evaluator._not,
    Or: Evaluator._or,
    Next: Evaluator._next,
    Prev: Evaluator._prev,
    Until: Evaluator._untimed,
    Since: Evaluator._untimed,
    NextClock: Evaluator._clock,
    PrevClock: Evaluator._clock,
    TUntil: Evaluator._timed,
    TSince: Evaluator._timed,
}


def eval_formula(word: TimedWord, i: int, f: Formula) -> bool:
    """Satisfaction of ``f`` at position ``i`` of ``word``."""
    return Evaluator(word).holds(f, i)


def models(word: TimedWord, f: Formula) -> bool:
    """The empty word is no model of anything (it has no position 0)."""
    if len(word) == 0:
        return False
    return Evaluator(word).holds(f, 0)


# ---------------------------------------------------------------------------
# closure


@lru_cache(maxsize=4096)
def closure_bases(f: Formula) -> tuple[Formula, ...]:
    """Non-negated closure members, every formula after the ones it is built from."""
    if any(isinstance(g, NMTL_NODES) for g in subformulas(f)):
        raise FormulaError("closure is defined for ECNTL formulas only")
    out: dict[Formula, None] = {TRUE: None}
    for name in (*RESERVED, PINF, *sorted(prop_names(f) - set(RESERVED) - {PINF})):
        out[Prop(name)] = None
    out[Next(ABSTRACT, TRUE)] = None
    out[Prev(ABSTRACT, TRUE)] = None
    for g in subformulas(f):
        if isinstance(g, Not):
            continue
        if isinstance(g, Until):
            out.setdefault(Next(g.axis, g), None)
        elif isinstance(g, Since):
            out.setdefault(Prev(g.axis, g), None)
        out.setdefault(g, None)
    # unwindings must follow the temporal formula they wrap
    ordered: dict[Formula, None] = {}
    for g in out:
        if isinstance(g, (Next, Prev)) and isinstance(g.arg, (Until, Since)) and g.arg not in ordered:
            continue
        ordered[g] = None
        if isinstance(g, Until) and Next(g.axis, g) in out:
            ordered[Next(g.axis, g)] = None
        if isinstance(g, Since) and Prev(g.axis, g) in out:
            ordered[Prev(g.axis, g)] = None
    return tuple(ordered)


def closure(f: Formula) -> tuple[Formula, ...]:
    """Every closure member followed by its negation (``¬¬ψ`` is ``ψ``)."""
    out = []
    for g in closure_bases(f):
        out.extend((g, neg(g)))
    return tuple(out)
