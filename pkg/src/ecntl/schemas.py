"""Ready-made ECNTL formulas: requirement schemas over procedures, and a
nested timed language (a call block, then a return block, with some matched
pair exactly 1 apart) together with a direct membership test.
"""

from __future__ import annotations

from typing import Optional

from .formulas import (
    TRUE,
    Always,
    And,
    Eventually,
    Formula,
    Implies,
    Next,
    NextClock,
    Not,
    Prev,
    PrevClock,
    Prop,
    conj,
)
from .words import ABSTRACT, CALLER, GLOBAL, Interval, TimedWord, classify

CALL, RET, INT = Prop("call"), Prop("ret"), Prop("int")


def total_correctness(k, pre: str = "p", post: str = "q", proc: str = "pA") -> Formula:
    """Calls to ``proc`` entered with ``pre`` return within ``k`` with ``post``."""
    trigger = conj(CALL, Prop(pre), Prop(proc))
    response = And(Next(ABSTRACT, Prop(post)), NextClock(ABSTRACT, Interval.closed(0, k), RET))
    return Always(GLOBAL, Implies(trigger, response))


def local_response(k, request: str = "p", response: str = "q", inside: str = "cA") -> Formula:
    """Inside ``inside``, each request sees a response on the same MAP within ``k``."""
    trigger = And(Prop(request), Prop(inside))
    return Always(GLOBAL, Implies(trigger, NextClock(ABSTRACT, Interval.closed(0, k), Prop(response))))


def stack_security(k, target: str = "pA", guard: str = "pB") -> Formula:
    """``target`` is only called with a ``guard`` call on the stack activated within ``k``."""
    trigger = And(CALL, Prop(target))
    return Always(GLOBAL, Implies(trigger, PrevClock(CALLER, Interval.closed(0, k), Prop(guard))))


def separating_language_formula() -> Formula:
    """Words ``call^n ret^n`` (n >= 1) in which some call returns exactly 1 later."""
    return conj(
        CALL,
        Always(GLOBAL, Not(INT)),
        Always(GLOBAL, Implies(CALL, Next(ABSTRACT, TRUE))),
        Always(GLOBAL, Implies(RET, Prev(ABSTRACT, TRUE))),
        Not(Eventually(GLOBAL, And(RET, Next(GLOBAL, Eventually(GLOBAL, CALL))))),
        Eventually(GLOBAL, And(CALL, NextClock(ABSTRACT, Interval.closed(1, 1), RET))),
    )


def unit_pair(word: TimedWord) -> Optional[tuple[int, int]]:
    """First matched (call, return) pair whose time distance is exactly 1."""
    for i, j in enumerate(word.nesting.match):
        if j is not None and word.stamps[j] - word.stamps[i] == 1:
            return i, j
    return None


def in_separating_language(word: TimedWord) -> bool:
    """Direct membership test, independent of the logic."""
    kinds = [classify(s) for s in word.symbols]
    n = len(kinds)
    if n == 0 or n % 2:
        return False
    half = n // 2
    if any(k != "call" for k in kinds[:half]) or any(k != "ret" for k in kinds[half:]):
        return False
    return unit_pair(word) is not None
