"""Event-clock nested automata: run semantics, membership, product, JSON documents."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Iterator

from .words import (
    CALL,
    INT,
    RET,
    ClockId,
    TimedWord,
    WordError,
    classify,
    clock_value,
    constraint_sat,
    parse_clock,
    parse_interval,
)

BOTTOM = "⊥"
PUSH, POP, INTERNAL = "push", "pop", "internal"
_KIND_OF = {CALL: PUSH, RET: POP, INT: INTERNAL}


class AutomatonError(ValueError):
    pass


class SchemaError(AutomatonError):
    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path


@dataclass(frozen=True)
class Transition:
    """``stack`` is the pushed symbol for push, the expected top for pop."""

    kind: str
    source: Hashable
    symbol: Hashable
    guard: tuple
    target: Hashable
    stack: Hashable | None = None

    def __post_init__(self) -> None:
        if self.kind not in (PUSH, POP, INTERNAL):
            raise AutomatonError(f"bad transition kind {self.kind!r}")
        if _KIND_OF[classify(self.symbol)] != self.kind:
            raise AutomatonError(f"{self.kind} transition reads a {classify(self.symbol)} symbol")
        if self.kind == PUSH and (self.stack is None or self.stack == BOTTOM):
            raise AutomatonError("push transitions must push a non-bottom symbol")
        if self.kind == POP and self.stack is None:
            raise AutomatonError("pop transitions must name the stack top they read")
        object.__setattr__(self, "guard", tuple(self.guard))


@dataclass(frozen=True)
class Configuration:
    state: Hashable
    stack: tuple = (BOTTOM,)  # top first, bottom last

    @property
    def top(self) -> Hashable:
        return self.stack[0]


class Valuation:
    """Lazy clock valuation of one position."""

    def __init__(self, word: TimedWord, i: int):
        self.word, self.i = word, i
        self._cache: dict[ClockId, Any] = {}

    def __call__(self, clock: ClockId):
        if clock not in self._cache:
            self._cache[clock] = clock_value(self.word, self.i, clock)
        return self._cache[clock]


class Ecna:
    """Explicit ECNA.  Subclasses may generate transitions on the fly by
    overriding :meth:`enabled`."""

    def __init__(
        self,
        states: Iterable[Hashable],
        initial: Iterable[Hashable],
        final: Iterable[Hashable],
        transitions: Iterable[Transition] = (),
        stack_symbols: Iterable[Hashable] = (),
        alphabet: str = "props",
    ):
        self.alphabet = alphabet
        self.states = tuple(dict.fromkeys(states))
        self.initial_order = tuple(dict.fromkeys(initial))
        self.initial = frozenset(self.initial_order)
        self.final = frozenset(final)
        self.stack_symbols = tuple(dict.fromkeys(stack_symbols))
        if BOTTOM in self.stack_symbols:
            raise AutomatonError("the bottom symbol cannot be a stack symbol")
        known = set(self.states)
        if not self.initial <= known or not self.final <= known:
            raise AutomatonError("initial and final states must be states")
        self.transitions = tuple(transitions)
        self._index: dict[tuple, list[Transition]] = {}
        gamma = set(self.stack_symbols)
        for t in self.transitions:
            if t.source not in known or t.target not in known:
                raise AutomatonError(f"transition {t} uses an unknown state")
            if t.kind != INTERNAL and t.stack != BOTTOM and t.stack not in gamma:
                raise AutomatonError(f"transition {t} uses an unknown stack symbol")
            self._index.setdefault((t.source, t.symbol), []).append(t)

    def moves(self, state: Hashable, symbol: Hashable) -> list[Transition]:
        return self._index.get((state, symbol), [])

    def check_symbol(self, sym: Any) -> None:
        if self.alphabet == "props":
            if not (isinstance(sym, frozenset) and all(isinstance(p, str) for p in sym)):
                raise AutomatonError(f"alphabet-mismatch: {sym!r} is not a proposition set")
        elif not hasattr(sym, "members"):
            raise AutomatonError(f"alphabet-mismatch: {sym!r} is not an atom")

    def enabled(self, state, word: TimedWord, i: int, top, val: Callable) -> Iterator[Transition]:
        for t in self.moves(state, word.symbols[i]):
            if t.kind == POP and t.stack != top:
                continue
            if constraint_sat(val, t.guard):
                yield t

    def step(self, cfg: Configuration, word: TimedWord, i: int) -> set[Configuration]:
        """All successor configurations after reading position ``i``."""
        val = Valuation(word, i)
        return {apply(t, cfg) for t in self.enabled(cfg.state, word, i, cfg.top, val)}

    def run(self, word: TimedWord) -> list[Configuration] | None:
        """Some accepting run (``len(word) + 1`` configurations), or ``None``."""
        for sym in word.symbols:
            self.check_symbol(sym)
        n = len(word)
        vals = [Valuation(word, i) for i in range(n)]
        seen: set[tuple[int, Configuration]] = set()
        for q0 in self.start_states(word):
            trail = [Configuration(q0)]
            # explicit DFS over (position, configuration)
            stack: list[tuple[int, Iterator[Transition]]] = []
            if n == 0:
                if q0 in self.final:
                    return trail
                continue
            stack.append((0, self.enabled(q0, word, 0, BOTTOM, vals[0])))
            while stack:
                i, it = stack[-1]
                t = next(it, None)
                if t is None:
                    stack.pop()
                    trail.pop()
                    continue
                nxt = apply(t, trail[-1])
                key = (i + 1, nxt)
                if key in seen:
                    continue
                seen.add(key)
                trail.append(nxt)
                if i + 1 == n:
                    if nxt.state in self.final:
                        return trail
                    trail.pop()
                    continue
                stack.append((i + 1, self.enabled(nxt.state, word, i + 1, nxt.top, vals[i + 1])))
        return None

    def accepts(self, word: TimedWord) -> bool:
        return self.run(word) is not None

    def start_states(self, word: TimedWord) -> Iterable[Hashable]:
        return self.initial_order


def apply(t: Transition, cfg: Configuration) -> Configuration:
    if t.kind == PUSH:
        return Configuration(t.target, (t.stack,) + cfg.stack)
    if t.kind == POP:
        if t.stack == BOTTOM:
            return Configuration(t.target, cfg.stack)
        return Configuration(t.target, cfg.stack[1:])
    return Configuration(t.target, cfg.stack)


def accepts(automaton: Ecna, word: TimedWord) -> bool:
    return automaton.accepts(word)


# ---------------------------------------------------------------------------
# product


def product(a1: Ecna, a2: Ecna) -> Ecna:
    """Synchronous product accepting the intersection of the two languages.

    Both components push on calls and pop on returns, so their stacks always
    have the same height; pairing stack symbols is therefore enough, with
    the bottom read only when both components read it.
    """
    if a1.alphabet != a2.alphabet:
        raise AutomatonError("alphabet-mismatch between product components")
    states = [(p, q) for p in a1.states for q in a2.states]
    trans = []
    by_symbol: dict[Hashable, list[Transition]] = {}
    for t in a2.transitions:
        by_symbol.setdefault(t.symbol, []).append(t)
    for t1 in a1.transitions:
        for t2 in by_symbol.get(t1.symbol, ()):
            if t1.kind == POP and (t1.stack == BOTTOM) != (t2.stack == BOTTOM):
                continue
            stack = None
            if t1.kind == PUSH or (t1.kind == POP and t1.stack != BOTTOM):
                stack = (t1.stack, t2.stack)
            elif t1.kind == POP:
                stack = BOTTOM
            trans.append(
                Transition(t1.kind, (t1.source, t2.source), t1.symbol, t1.guard + t2.guard,
                           (t1.target, t2.target), stack)
            )
    gamma = [(g1, g2) for g1 in a1.stack_symbols for g2 in a2.stack_symbols]
    return Ecna(
        states,
        [(p, q) for p in a1.initial for q in a2.initial],
        [(p, q) for p in a1.final for q in a2.final],
        trans,
        gamma,
        a1.alphabet,
    )


def universal(symbols: Iterable[frozenset], state: str = "u") -> Ecna:
    """One final state looping on every symbol; pushes a single marker."""
    trans = []
    for s in symbols:
        kind = _KIND_OF[classify(s)]
        if kind == PUSH:
            trans.append(Transition(PUSH, state, s, (), state, "m"))
        elif kind == POP:
            trans.append(Transition(POP, state, s, (), state, "m"))
            trans.append(Transition(POP, state, s, (), state, BOTTOM))
        else:
            trans.append(Transition(INTERNAL, state, s, (), state))
    return Ecna([state], [state], [state], trans, ["m"])


# ---------------------------------------------------------------------------
# documents

_FIELDS = ("alphabet", "states", "initial", "final", "stack", "transitions")


def _name(x: Hashable) -> Any:
    if isinstance(x, tuple):
        return [_name(y) for y in x]
    return x


def _unname(x: Any) -> Hashable:
    if isinstance(x, list):
        return tuple(_unname(y) for y in x)
    return x


def _symbol_doc(sym: Any) -> list[str]:
    if hasattr(sym, "members"):
        from .syntax import to_text

        return sorted(to_text(f) for f in sym.members)
    return sorted(sym)


def to_doc(a: Ecna) -> dict:
    out_t = []
    for t in a.transitions:
        rec = {
            "kind": t.kind,
            "from": _name(t.source),
            "input": _symbol_doc(t.symbol),
            "guard": [{"clock": _clock_text(c), "interval": str(iv)} for c, iv in t.guard],
            "to": _name(t.target),
        }
        if t.kind != INTERNAL:
            rec["stack_sym"] = _name(t.stack)
        out_t.append(rec)
    return {
        "alphabet": a.alphabet,
        "states": [_name(s) for s in a.states],
        "initial": sorted((_name(s) for s in a.initial), key=json.dumps),
        "final": sorted((_name(s) for s in a.final), key=json.dumps),
        "stack": [_name(g) for g in a.stack_symbols],
        "transitions": out_t,
    }


def _clock_text(c: ClockId) -> str:
    if isinstance(c.index, str):
        return str(c)
    from .syntax import to_text

    return f"{c.key}:{to_text(c.index)}"


def from_doc(doc: Any) -> Ecna:
    if not isinstance(doc, dict):
        raise SchemaError("$", "automaton document must be an object")
    for key in _FIELDS:
        if key not in doc:
            raise SchemaError(f"$.{key}", "missing field")
    alphabet = doc["alphabet"]
    if alphabet not in ("props", "atoms"):
        raise SchemaError("$.alphabet", "must be 'props' or 'atoms'")
    for key in ("states", "initial", "final", "stack", "transitions"):
        if not isinstance(doc[key], list):
            raise SchemaError(f"$.{key}", "expected a list")

    if alphabet == "atoms":
        from .syntax import parse
        from .tableau import Atom

        def symbol(x):
            return Atom(frozenset(parse(m) for m in x))

        def index(name):
            return parse(name)
    else:
        symbol = frozenset
        index = None

    trans = []
    for k, rec in enumerate(doc["transitions"]):
        path = f"$.transitions[{k}]"
        if not isinstance(rec, dict):
            raise SchemaError(path, "expected an object")
        for key in ("kind", "from", "input", "guard", "to"):
            if key not in rec:
                raise SchemaError(f"{path}.{key}", "missing field")
        if rec["kind"] != INTERNAL and "stack_sym" not in rec:
            raise SchemaError(f"{path}.stack_sym", "missing field")
        if not isinstance(rec["input"], list):
            raise SchemaError(f"{path}.input", "expected a list of names")
        guard = []
        for m, g in enumerate(rec["guard"]):
            gpath = f"{path}.guard[{m}]"
            try:
                guard.append((parse_clock(g["clock"], index), parse_interval(g["interval"])))
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(gpath, str(exc)) from None
        try:
            trans.append(
                Transition(rec["kind"], _unname(rec["from"]), symbol(rec["input"]), tuple(guard),
                           _unname(rec["to"]), _unname(rec.get("stack_sym")))
            )
        except (AutomatonError, WordError, ValueError) as exc:
            raise SchemaError(path, str(exc)) from None
    try:
        return Ecna(
            [_unname(s) for s in doc["states"]],
            [_unname(s) for s in doc["initial"]],
            [_unname(s) for s in doc["final"]],
            trans,
            [_unname(g) for g in doc["stack"]],
            alphabet,
        )
    except AutomatonError as exc:
        raise SchemaError("$", str(exc)) from None


def dumps(a: Ecna) -> str:
    return json.dumps(to_doc(a), ensure_ascii=False)


def loads(text: str) -> Ecna:
    return from_doc(json.loads(text))


def structurally_equal(a: Ecna, b: Ecna) -> bool:
    return (
        a.alphabet == b.alphabet
        and set(a.states) == set(b.states)
        and a.initial == b.initial
        and a.final == b.final
        and set(a.stack_symbols) == set(b.stack_symbols)
        and set(a.transitions) == set(b.transitions)
    )
