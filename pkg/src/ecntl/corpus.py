"""Seeded random formulas and exhaustive small timed words for differential testing."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations_with_replacement, product
from typing import Iterator, Sequence

from .formulas import (
    TRUE,
    Formula,
    Next,
    NextClock,
    Not,
    Or,
    Prev,
    PrevClock,
    Prop,
    Since,
    TSince,
    TUntil,
    Until,
    And,
)
from .automaton import BOTTOM, INTERNAL, POP, PUSH, Ecna, Transition
from .logic import closure
from .nmtl import is_nmitl
from .words import (
    ABSTRACT,
    CALLER,
    GLOBAL,
    PREDICTOR,
    RECORDER,
    UNDEF,
    ClockId,
    Interval,
    TimedWord,
    classify,
)

ALPHABET = (frozenset({"call"}), frozenset({"ret"}), frozenset({"int"}), frozenset({"int", "p"}))
GRID = tuple(Fraction(k, 2) for k in range(5))  # 0, 1/2, 1, 3/2, 2

CLOCK_INTERVALS = (
    Interval.closed(0, 1),
    Interval.closed(1, 1),
    Interval.closed(1, 2),
    Interval(0, 1, True, True),
    Interval(1, None),
    Interval(1, None, True),
    Interval(0, 2, False, True),
    UNDEF,
)
INTS_INTERVALS = (
    Interval(0, None),
    Interval(0, None, True),
    Interval.closed(0, 1),
    Interval(0, 1, False, True),
    Interval.closed(0, 2),
    Interval(1, None),
    Interval(1, None, True),
    Interval(2, None),
)
ATOMS = ("p", "call", "ret", "int")


def random_ecntl(rng: random.Random, depth: int, atoms: Sequence[str] = ATOMS) -> Formula:
    if depth <= 0 or rng.random() < 0.2:
        return TRUE if rng.random() < 0.1 else Prop(rng.choice(atoms))
    sub = lambda: random_ecntl(rng, depth - 1, atoms)  # noqa: E731
    op = rng.randrange(10)
    if op == 0:
        return Not(sub())
    if op == 1:
        return Or(sub(), sub()) if rng.random() < 0.5 else And(sub(), sub())
    if op == 2:
        return Next(rng.choice((GLOBAL, ABSTRACT)), sub())
    if op == 3:
        return Prev(rng.choice((GLOBAL, ABSTRACT, CALLER)), sub())
    if op == 4:
        return Until(rng.choice((GLOBAL, ABSTRACT)), sub(), sub())
    if op == 5:
        return Since(rng.choice((GLOBAL, ABSTRACT, CALLER)), sub(), sub())
    if op in (6, 7):
        return NextClock(rng.choice((GLOBAL, ABSTRACT)), rng.choice(CLOCK_INTERVALS), sub())
    return PrevClock(rng.choice((GLOBAL, ABSTRACT, CALLER)), rng.choice(CLOCK_INTERVALS), sub())


def ecntl_corpus(count: int, seed: int = 0, max_closure: int = 24, depth: int = 3) -> list[Formula]:
    """Distinct random formulas with closures of at most ``max_closure`` members."""
    rng = random.Random(seed)
    out: dict[Formula, None] = {}
    while len(out) < count:
        f = random_ecntl(rng, depth)
        if len(closure(f)) <= max_closure:
            out.setdefault(f, None)
    return list(out)


def random_nmitl(rng: random.Random, depth: int, atoms: Sequence[str] = ATOMS) -> Formula:
    if depth <= 0 or rng.random() < 0.2:
        return TRUE if rng.random() < 0.1 else Prop(rng.choice(atoms))
    sub = lambda: random_nmitl(rng, depth - 1, atoms)  # noqa: E731
    op = rng.randrange(6)
    if op == 0:
        return Not(sub())
    if op == 1:
        return Or(sub(), sub()) if rng.random() < 0.5 else And(sub(), sub())
    iv = rng.choice(INTS_INTERVALS)
    if op in (2, 3):
        return TUntil(rng.choice((GLOBAL, ABSTRACT)), iv, sub(), sub())
    return TSince(rng.choice((GLOBAL, ABSTRACT, CALLER)), iv, sub(), sub())


def nmitl_corpus(count: int, seed: int = 0, depth: int = 3) -> list[Formula]:
    rng = random.Random(seed)
    out: dict[Formula, None] = {}
    while len(out) < count:
        f = random_nmitl(rng, depth)
        if is_nmitl(f):
            out.setdefault(f, None)
    return list(out)


def stamp_sequences(length: int, grid: Sequence[Fraction] = GRID) -> Iterator[tuple[Fraction, ...]]:
    """Weakly increasing sequences over the grid."""
    return combinations_with_replacement(sorted(grid), length)


def grid_words(
    maxlen: int = 4,
    alphabet: Sequence[frozenset] = ALPHABET,
    grid: Sequence[Fraction] = GRID,
    minlen: int = 1,
) -> Iterator[TimedWord]:
    for n in range(minlen, maxlen + 1):
        stamps = list(stamp_sequences(n, grid))
        for syms in product(alphabet, repeat=n):
            for ts in stamps:
                yield TimedWord(syms, ts)


_KIND = {"call": PUSH, "ret": POP, "int": INTERNAL}


def random_clock(rng: random.Random, atoms: Sequence[str] = ATOMS) -> ClockId:
    axis = rng.choice((GLOBAL, ABSTRACT, CALLER))
    direction = RECORDER if axis == CALLER else rng.choice((RECORDER, PREDICTOR))
    return ClockId(axis, direction, rng.choice(atoms))


def random_ecna(
    rng: random.Random,
    alphabet: Sequence[frozenset] = ALPHABET,
    states: int = 3,
    stack_symbols: int = 2,
    density: float = 0.4,
    guard_rate: float = 0.4,
) -> Ecna:
    """A small nondeterministic ECNA over proposition sets with random guards."""
    qs = [f"q{k}" for k in range(states)]
    gamma = [f"g{k}" for k in range(stack_symbols)]
    trans = []
    for q in qs:
        for sym in alphabet:
            kind = _KIND[classify(sym)]
            tops = gamma + [BOTTOM] if kind == POP else [None]
            for target in qs:
                for top in tops:
                    if rng.random() >= density:
                        continue
                    guard = ()
                    if rng.random() < guard_rate:
                        guard = ((random_clock(rng), rng.choice(CLOCK_INTERVALS)),)
                    stack = rng.choice(gamma) if kind == PUSH else top
                    trans.append(Transition(kind, q, sym, guard, target, stack))
    initial = [q for q in qs if rng.random() < 0.5] or [qs[0]]
    final = [q for q in qs if rng.random() < 0.5] or [qs[-1]]
    return Ecna(qs, initial, final, trans, gamma)
