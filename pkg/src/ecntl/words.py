"""Timed words over a pushdown alphabet and their nesting structure.

A symbol is any container answering ``in`` for the reserved names ``call``,
``ret`` and ``int``: plain frozensets of proposition names for input words,
tableau atoms for Hintikka words.  Everything structural (matching returns,
abstract and caller successors, maximal abstract paths) depends only on the
call/ret/int skeleton, so it is computed once per skeleton and cached.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Hashable, Iterable, Sequence

CALL, RET, INT = "call", "ret", "int"
RESERVED = (CALL, RET, INT)
PINF = "pinf"

GLOBAL, ABSTRACT, CALLER = "global", "abstract", "caller"
AXES = (GLOBAL, ABSTRACT, CALLER)
RECORDER, PREDICTOR = "recorder", "predictor"

_AXIS_LETTER = {GLOBAL: "g", ABSTRACT: "a", CALLER: "c"}
_LETTER_AXIS = {v: k for k, v in _AXIS_LETTER.items()}


class WordError(ValueError):
    """Malformed symbol, bad position or bad word document."""


def propset(*names: str) -> frozenset[str]:
    return frozenset(names)


def classify(sym: Any) -> str:
    """Return which of ``call``/``ret``/``int`` the symbol carries."""
    found = [r for r in RESERVED if r in sym]
    if len(found) != 1:
        raise WordError(f"malformed symbol {_show(sym)}: needs exactly one of call/ret/int")
    return found[0]


def _show(sym: Any) -> str:
    if isinstance(sym, frozenset):
        return "{" + ",".join(sorted(map(str, sym))) + "}"
    return repr(sym)


# ---------------------------------------------------------------------------
# intervals and clocks


@dataclass(frozen=True)
class Interval:
    """Interval over the non-negative rationals with natural endpoints.

    ``hi is None`` means +infinity.  ``undef`` marks the singleton holding
    only the undefined clock value.
    """

    lo: int = 0
    hi: int | None = None
    lo_open: bool = False
    hi_open: bool = True
    undef: bool = False

    def __post_init__(self) -> None:
        if self.undef:
            return
        if self.lo < 0 or (self.hi is not None and self.hi < 0):
            raise ValueError("interval endpoints must be naturals")
        if self.hi is None:
            object.__setattr__(self, "hi_open", True)
        elif self.hi < self.lo or (self.hi == self.lo and (self.lo_open or self.hi_open)):
            raise ValueError(f"empty interval {self}")

    @classmethod
    def closed(cls, lo: int, hi: int | None) -> "Interval":
        return cls(lo, hi, False, hi is None)

    def __contains__(self, value: Fraction | None) -> bool:
        if value is None:
            return self.undef
        if self.undef:
            return False
        if value < self.lo or (self.lo_open and value == self.lo):
            return False
        if self.hi is None:
            return True
        return value < self.hi or (not self.hi_open and value == self.hi)

    @property
    def bounded(self) -> bool:
        return not self.undef and self.hi is not None

    def constants(self) -> set[int]:
        if self.undef:
            return set()
        out = {self.lo} if self.lo else set()
        if self.hi is not None:
            out.add(self.hi)
        return out

    def complement(self) -> list["Interval"]:
        """Maximal pieces (undefined singleton first) covering everything outside."""
        if self.undef:
            return [Interval()]
        pieces = [UNDEF]
        if self.lo_open:
            pieces.append(Interval(0, self.lo, False, False))
        elif self.lo > 0:
            pieces.append(Interval(0, self.lo, False, True))
        if self.hi is not None:
            pieces.append(Interval(self.hi, None, not self.hi_open, True))
        return pieces

    def __str__(self) -> str:
        if self.undef:
            return "undef"
        left = "(" if self.lo_open else "["
        if self.hi is None:
            return f"{left}{self.lo},inf)"
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo},{self.hi}{right}"


UNDEF = Interval(undef=True)
ANY = Interval()


def parse_interval(text: str) -> Interval:
    text = text.strip()
    if text == "undef":
        return UNDEF
    if len(text) < 5 or text[0] not in "[(" or text[-1] not in "])" or "," not in text:
        raise ValueError(f"bad interval {text!r}")
    lo_s, hi_s = text[1:-1].split(",", 1)
    hi_s = hi_s.strip()
    hi = None if hi_s in ("inf", "oo", "∞") else int(hi_s)
    if hi is None and text[-1] != ")":
        raise ValueError(f"infinite endpoint must be open: {text!r}")
    return Interval(int(lo_s), hi, text[0] == "(", text[-1] == ")")


@dataclass(frozen=True)
class ClockId:
    axis: str
    direction: str
    index: Hashable

    def __post_init__(self) -> None:
        if self.axis not in AXES or self.direction not in (RECORDER, PREDICTOR):
            raise ValueError(f"bad clock {self.axis}/{self.direction}")
        if self.axis == CALLER and self.direction == PREDICTOR:
            raise WordError("caller-predictor-requested: there is no caller predictor clock")

    @property
    def key(self) -> str:
        return ("x" if self.direction == RECORDER else "y") + _AXIS_LETTER[self.axis]

    def __str__(self) -> str:
        return f"{self.key}:{self.index}"


def parse_clock(text: str, index_parser=None) -> ClockId:
    head, sep, name = text.partition(":")
    if not sep or len(head) != 2 or head[0] not in "xy" or head[1] not in "gac" or not name:
        raise ValueError(f"bad clock key {text!r}")
    direction = RECORDER if head[0] == "x" else PREDICTOR
    index = index_parser(name) if index_parser else name
    return ClockId(_LETTER_AXIS[head[1]], direction, index)


ClockConstraint = tuple  # tuple[tuple[ClockId, Interval], ...]; () holds everywhere


def constraint_sat(val, theta: Iterable[tuple[ClockId, Interval]]) -> bool:
    """``val`` maps clocks to values (a dict or a callable)."""
    get = val if callable(val) else val.get
    return all(get(clock) in interval for clock, interval in theta)


# ---------------------------------------------------------------------------
# nesting structure


class Nesting:
    """Positional structure of one call/ret/int skeleton.

    Arrays are indexed by position; ``None`` is the undefined position.
    """

    def __init__(self, kinds: Sequence[str]):
        n = len(kinds)
        self.kinds = tuple(kinds)
        self.n = n
        match: list[int | None] = [None] * n
        match_call: list[int | None] = [None] * n
        stack: list[int] = []
        for i, k in enumerate(kinds):
            if k == CALL:
                stack.append(i)
            elif k == RET and stack:
                c = stack.pop()
                match[c] = i
                match_call[i] = c
        self.match = tuple(match)
        self.match_call = tuple(match_call)

        abs_next: list[int | None] = [None] * n
        for i, k in enumerate(kinds):
            if k == CALL:
                abs_next[i] = match[i]
            elif i + 1 < n and kinds[i + 1] != RET:
                abs_next[i] = i + 1
        abs_prev: list[int | None] = [None] * n
        for i, j in enumerate(abs_next):
            if j is not None:
                abs_prev[j] = i
        self.abs_next = tuple(abs_next)
        self.abs_prev = tuple(abs_prev)

        # caller of i: innermost call still pending strictly before i
        caller: list[int | None] = [None] * n
        pending: list[int] = []
        for i, k in enumerate(kinds):
            while pending and match[pending[-1]] is not None and match[pending[-1]] <= i:
                pending.pop()
            caller[i] = pending[-1] if pending else None
            if k == CALL:
                pending.append(i)
        self.caller = tuple(caller)

        maps: list[tuple[int, ...] | None] = [None] * n
        for i in range(n):
            if abs_prev[i] is None:
                path = [i]
                while abs_next[path[-1]] is not None:
                    path.append(abs_next[path[-1]])
                t = tuple(path)
                for j in t:
                    maps[j] = t
        self.maps = tuple(maps)
        cpaths = []
        for i in range(n):
            path = [i]
            while caller[path[-1]] is not None:
                path.append(caller[path[-1]])
            cpaths.append(tuple(reversed(path)))
        self.caller_paths = tuple(cpaths)
        # pinf fails exactly where the caller has a matching return
        self.pinf = tuple(c is None or match[c] is None for c in caller)
        self._scan: dict = {}

    def check(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexError(f"position {i} out of range for length {self.n}")

    def succ(self, axis: str, i: int) -> int | None:
        self.check(i)
        if axis == GLOBAL:
            return i + 1 if i + 1 < self.n else None
        if axis == ABSTRACT:
            return self.abs_next[i]
        if axis == CALLER:
            return self.caller[i]
        raise ValueError(axis)

    def path(self, axis: str, i: int) -> tuple[int, ...]:
        """Ascending positions of the axis path through ``i``."""
        self.check(i)
        if axis == GLOBAL:
            return tuple(range(self.n))
        if axis == ABSTRACT:
            return self.maps[i]
        if axis == CALLER:
            return self.caller_paths[i]
        raise ValueError(axis)

    def later(self, axis: str, i: int) -> tuple[int, ...]:
        """Path positions strictly after ``i``, nearest first."""
        key = (True, axis, i)
        out = self._scan.get(key)
        if out is None:
            out = self._scan[key] = self._later(axis, i)
        return out

    def earlier(self, axis: str, i: int) -> tuple[int, ...]:
        """Path positions strictly before ``i``, nearest first."""
        key = (False, axis, i)
        out = self._scan.get(key)
        if out is None:
            out = self._scan[key] = self._earlier(axis, i)
        return out

    def _later(self, axis: str, i: int) -> tuple[int, ...]:
        if axis == GLOBAL:
            return tuple(range(i + 1, self.n))
        if axis == ABSTRACT:
            p = self.maps[i]
            return p[p.index(i) + 1:]
        raise ValueError(f"no future along the {axis} axis")

    def _earlier(self, axis: str, i: int) -> tuple[int, ...]:
        if axis == GLOBAL:
            return tuple(range(i - 1, -1, -1))
        p = self.maps[i] if axis == ABSTRACT else self.caller_paths[i]
        return tuple(reversed(p[: p.index(i)]))


@lru_cache(maxsize=4096)
def nesting_of(kinds: tuple[str, ...]) -> Nesting:
    return Nesting(kinds)


def skeleton(symbols: Sequence[Any]) -> Nesting:
    return nesting_of(tuple(classify(s) for s in symbols))


def matching_return(symbols: Sequence[Any], i: int) -> int | None:
    nest = skeleton(symbols)
    nest.check(i)
    if nest.kinds[i] != CALL:
        raise WordError(f"not-a-call: position {i} is {nest.kinds[i]}")
    return nest.match[i]


def successor(kind: str, symbols: Sequence[Any], i: int) -> int | None:
    return skeleton(symbols).succ(kind, i)


def positions(kind: str, symbols: Sequence[Any], i: int) -> tuple[int, ...]:
    return skeleton(symbols).path(kind, i)


# ---------------------------------------------------------------------------
# timed words


def to_time(value: Any) -> Fraction:
    if type(value) is Fraction and value >= 0:
        return value
    if isinstance(value, float):
        raise TypeError("timestamps must be exact; pass a string, int or Fraction")
    t = Fraction(value)
    if t < 0:
        raise WordError(f"negative timestamp {t}")
    return t


@dataclass(frozen=True)
class TimedWord:
    symbols: tuple
    stamps: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "stamps", tuple(to_time(t) for t in self.stamps))
        if len(self.symbols) != len(self.stamps):
            raise WordError("symbols and stamps differ in length")

    @classmethod
    def of(cls, *pairs: tuple[Iterable[str], Any]) -> "TimedWord":
        """``TimedWord.of(({"call"}, 0), ({"ret"}, "1/2"))``"""
        return cls(tuple(frozenset(s) for s, _ in pairs), tuple(t for _, t in pairs))

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def nesting(self) -> Nesting:
        return skeleton(self.symbols)


def clock_reference(symbols: Sequence[Any], i: int, clock: ClockId) -> int | None:
    """Position whose timestamp the clock measures against, if any."""
    nest = skeleton(symbols)
    nest.check(i)
    walk = nest.earlier(clock.axis, i) if clock.direction == RECORDER else nest.later(clock.axis, i)
    for j in walk:
        if clock.index in symbols[j]:
            return j
    return None


def clock_value(word: TimedWord, i: int, clock: ClockId) -> Fraction | None:
    j = clock_reference(word.symbols, i, clock)
    if j is None:
        return None
    return abs(word.stamps[i] - word.stamps[j])


def validate_word(word: TimedWord) -> str | None:
    """Return ``None`` when valid, else a diagnostic naming the first bad position."""
    for i, sym in enumerate(word.symbols):
        if not isinstance(sym, frozenset) or not all(isinstance(p, str) for p in sym):
            return f"position {i}: symbol is not a set of proposition names"
        if sum(r in sym for r in RESERVED) != 1:
            return f"position {i}: malformed symbol {_show(sym)}"
        if PINF in sym:
            return f"position {i}: reserved proposition pinf in input word"
        if i and word.stamps[i] < word.stamps[i - 1]:
            return f"position {i}: non-monotone timestamp {word.stamps[i]} < {word.stamps[i - 1]}"
    return None


def _time_text(t: Fraction) -> str:
    return str(t.numerator) if t.denominator == 1 else f"{t.numerator}/{t.denominator}"


def word_to_doc(word: TimedWord) -> list[dict]:
    return [{"props": sorted(s), "t": _time_text(t)} for s, t in zip(word.symbols, word.stamps)]


def word_from_doc(doc: Any) -> TimedWord:
    if not isinstance(doc, list):
        raise WordError("timed-word document must be a list of records")
    syms, stamps = [], []
    for k, rec in enumerate(doc):
        if not isinstance(rec, dict) or "props" not in rec or "t" not in rec:
            raise WordError(f"[{k}]: record needs 'props' and 't'")
        if not isinstance(rec["props"], list):
            raise WordError(f"[{k}].props: expected a list")
        syms.append(frozenset(rec["props"]))
        try:
            stamps.append(to_time(str(rec["t"])))
        except (ValueError, ZeroDivisionError) as exc:
            raise WordError(f"[{k}].t: {exc}") from None
    return TimedWord(tuple(syms), tuple(stamps))


def load_word(path: str) -> TimedWord:
    with open(path) as fh:
        return word_from_doc(json.load(fh))
