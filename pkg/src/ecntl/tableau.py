"""Closure atoms, Hintikka sequences over finite words, and the ECNTL to ECNA tableau.

Atoms store only their non-negated closure members; ``¬ψ ∈ A`` is read as
``ψ ∉ A``.  Until and since are unwound in both directions inside an atom
(``ψ1 U ψ2 ∈ A`` iff ``ψ2 ∈ A`` or ``ψ1, ○(ψ1 U ψ2) ∈ A``), which on finite
words makes the local conditions exact: at the last position of a path the
next-step formula is false, so an asserted until must be fulfilled there.

The tableau automaton reads a word of atoms.  Its states are the atoms, the
input must equal the source state, and the target is the next atom.  The end
of the word is recognised with the global predictor clocks of ``call``,
``ret`` and ``int``: they are all undefined exactly at the last position, where
the automaton loops on its current atom, so the final state is the last atom
and acceptance asks it to be terminal-admissible.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product as cartesian
from typing import Iterable, Iterator, Sequence

from .automaton import BOTTOM, INTERNAL, POP, PUSH, Ecna, Transition
from .formulas import (
    CLOCK_NODES,
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
    TrueF,
    Until,
    metrics,
)
from .logic import Evaluator, closure_bases
from .words import (
    ABSTRACT,
    ANY,
    CALL,
    CALLER,
    GLOBAL,
    INT,
    PINF,
    PREDICTOR,
    RECORDER,
    RESERVED,
    RET,
    UNDEF,
    ClockId,
    TimedWord,
    classify,
    clock_value,
    skeleton,
)

XA_TRUE = Next(ABSTRACT, TRUE)
PA_TRUE = Prev(ABSTRACT, TRUE)
PINF_PROP = Prop(PINF)
_PROP_CACHE: dict[str, Prop] = {}


def _prop(name: str) -> Prop:
    p = _PROP_CACHE.get(name)
    if p is None:
        p = _PROP_CACHE[name] = Prop(name)
    return p


class TableauError(ValueError):
    pass


class Atom:
    """A closure atom, identified by its set of non-negated members."""

    __slots__ = ("members", "formula", "_hash")

    def __init__(self, members: Iterable[Formula], formula: Formula | None = None):
        self.members = frozenset(members)
        self.formula = formula
        self._hash = hash(self.members)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return isinstance(other, Atom) and self._hash == other._hash and self.members == other.members

    def __hash__(self) -> int:
        return self._hash

    def __contains__(self, item) -> bool:
        if isinstance(item, str):
            return _prop(item) in self.members
        positive = True
        while isinstance(item, Not):
            item, positive = item.arg, not positive
        if isinstance(item, TrueF):
            return positive
        return (item in self.members) == positive

    @property
    def kind(self) -> str:
        return classify(self)

    def props(self) -> frozenset[str]:
        """Propositions of the projection (``pinf`` excluded)."""
        return frozenset(g.name for g in self.members if isinstance(g, Prop) and g.name != PINF)

    def __repr__(self) -> str:
        from .syntax import to_text

        inner = ", ".join(sorted(to_text(g) for g in self.members if not isinstance(g, TrueF)))
        return f"Atom{{{inner}}}"


@dataclass(frozen=True)
class HintikkaWord(TimedWord):
    formula: Formula | None = None

    def projection(self) -> TimedWord:
        return TimedWord(tuple(a.props() for a in self.symbols), self.stamps)


@dataclass(frozen=True)
class _Info:
    kind: str
    pinf: bool
    xa_true: bool
    pa_true: bool
    g_prof: tuple
    g_dem: tuple
    a_prof: tuple
    a_dem: tuple
    c_prof: tuple
    c_dem: tuple
    terminal: bool
    initial: bool


class Tableau:
    """Atoms of one formula together with the local Hintikka predicates."""

    def __init__(self, phi: Formula):
        self.phi = phi
        self.bases = closure_bases(phi)
        self.order = {g: k for k, g in enumerate(self.bases)}
        b = self.bases
        self.xg = [g for g in b if isinstance(g, Next) and g.axis == GLOBAL]
        self.xa = [g for g in b if isinstance(g, Next) and g.axis == ABSTRACT]
        self.pg = [g for g in b if isinstance(g, Prev) and g.axis == GLOBAL]
        self.pa = [g for g in b if isinstance(g, Prev) and g.axis == ABSTRACT]
        self.pc = [g for g in b if isinstance(g, Prev) and g.axis == CALLER]
        self.clock_formulas = [g for g in b if isinstance(g, CLOCK_NODES)]
        self.clocks = [
            (ClockId(g.axis, PREDICTOR if isinstance(g, NextClock) else RECORDER, g.arg), g, g.interval)
            for g in self.clock_formulas
        ]
        self._step: dict[tuple[Atom, Atom], bool] = {}

    # -- atoms ---------------------------------------------------------------

    @cached_property
    def atoms(self) -> tuple[Atom, ...]:
        leaves = [
            g
            for g in self.bases
            if isinstance(g, (Next, Prev, NextClock, PrevClock))
            or (isinstance(g, Prop) and g.name not in RESERVED)
        ]
        derived = [g for g in self.bases if isinstance(g, (Or, Until, Since))]
        xa_rest = [g for g in self.xa if g != XA_TRUE]
        pa_rest = [g for g in self.pa if g != PA_TRUE]
        out = []
        for kind in RESERVED:
            for bits in cartesian((False, True), repeat=len(leaves)):
                s = {TRUE, _prop(kind)}
                s.update(g for g, bit in zip(leaves, bits) if bit)
                if XA_TRUE not in s and any(g in s for g in xa_rest):
                    continue
                if PA_TRUE not in s and any(g in s for g in pa_rest):
                    continue
                for g in derived:
                    if isinstance(g, Or):
                        val = _holds(s, g.left) or _holds(s, g.right)
                    elif isinstance(g, Until):
                        val = _holds(s, g.right) or (_holds(s, g.left) and Next(g.axis, g) in s)
                    else:
                        val = _holds(s, g.right) or (_holds(s, g.left) and Prev(g.axis, g) in s)
                    if val:
                        s.add(g)
                out.append(Atom(s, self.phi))
        out.sort(key=self.bits)
        return tuple(out)

    def bits(self, atom: Atom) -> int:
        return sum(1 << self.order[g] for g in atom.members)

    @cached_property
    def atom_set(self) -> frozenset[Atom]:
        return frozenset(self.atoms)

    @cached_property
    def info(self) -> dict[Atom, _Info]:
        return {a: self._info(a) for a in self.atoms}

    def _info(self, a: Atom) -> _Info:
        c_prof = tuple(g in a for g in self.pc)
        return _Info(
            kind=a.kind,
            pinf=PINF_PROP in a,
            xa_true=XA_TRUE in a,
            pa_true=PA_TRUE in a,
            g_prof=tuple(g.arg in a for g in self.xg) + tuple(g in a for g in self.pg),
            g_dem=tuple(g in a for g in self.xg) + tuple(g.arg in a for g in self.pg),
            a_prof=tuple(g.arg in a for g in self.xa) + tuple(g in a for g in self.pa) + c_prof,
            a_dem=tuple(g in a for g in self.xa) + tuple(g.arg in a for g in self.pa) + c_prof,
            c_prof=c_prof,
            c_dem=tuple(g.arg in a for g in self.pc),
            terminal=not any(g in a for g in self.xg) and XA_TRUE not in a and PINF_PROP in a,
            initial=self.phi in a and not any(g in a for g in self.pg + self.pa + self.pc),
        )

    def atom_of(self, members: Iterable[Formula]) -> Atom:
        a = Atom(members, self.phi)
        if a not in self.info:
            raise TableauError(f"{a!r} is not an atom of {self.phi}")
        return a

    @cached_property
    def initial_atoms(self) -> tuple[Atom, ...]:
        return tuple(a for a in self.atoms if self.info[a].initial)

    @cached_property
    def terminal_atoms(self) -> tuple[Atom, ...]:
        return tuple(a for a in self.atoms if self.info[a].terminal)

    @cached_property
    def _by_gprof(self) -> dict[tuple, list[Atom]]:
        out: dict[tuple, list[Atom]] = {}
        for a in self.atoms:
            out.setdefault(self.info[a].g_prof, []).append(a)
        return out

    # -- local conditions ----------------------------------------------------

    def step_ok(self, a: Atom, b: Atom) -> bool:
        """Properties 2 and 3 for consecutive atoms, except the matched-return
        check, which needs the call atom from the stack (see :meth:`pop_ok`)."""
        key = (a, b)
        r = self._step.get(key)
        if r is None:
            r = self._step[key] = self._step_ok(self.info[a], self.info[b])
        return r

    @staticmethod
    def _step_ok(ia: _Info, ib: _Info) -> bool:
        if ia.g_dem != ib.g_prof:
            return False
        if ia.kind != CALL:
            if ib.kind != RET:
                return ia.a_dem == ib.a_prof and ia.pinf == ib.pinf
            if ia.xa_true:
                return False
            return ib.pa_true or (ia.pinf and ib.pinf and not any(ib.c_prof))
        if ib.kind != RET:
            # first position inside a call: it has no abstract predecessor
            return ib.c_prof == ia.c_dem and ia.xa_true == (not ib.pinf) and not ib.pa_true
        return True

    def successors(self, a: Atom) -> list[Atom]:
        """Atoms that may follow ``a`` (stack conditions not included)."""
        return [b for b in self._by_gprof.get(self.info[a].g_dem, ()) if self.step_ok(a, b)]

    def push_ok(self, a: Atom) -> bool:
        ia = self.info[a]
        return ia.xa_true or ia.pinf

    def pop_ok(self, top: Atom | None, b: Atom) -> bool:
        ib = self.info[b]
        if top is None:
            return not ib.pa_true
        it = self.info[top]
        return ib.pa_true and it.a_dem == ib.a_prof and it.pinf == ib.pinf

    def guard_options(self, a: Atom) -> list[list[tuple[ClockId, object]]]:
        """Per clock formula, the atomic constraints one of which must hold."""
        out = []
        for clock, g, iv in self.clocks:
            if g in a:
                out.append([(clock, iv)])
            else:
                out.append([(clock, piece) for piece in iv.complement()])
        return out


def _holds(s: set, g: Formula) -> bool:
    positive = True
    while isinstance(g, Not):
        g, positive = g.arg, not positive
    if isinstance(g, TrueF):
        return positive
    return (g in s) == positive


@lru_cache(maxsize=512)
def tableau_of(phi: Formula) -> Tableau:
    return Tableau(phi)


def enumerate_atoms(phi: Formula) -> tuple[Atom, ...]:
    return tableau_of(phi).atoms


# ---------------------------------------------------------------------------
# predicates


def _common(a: Atom, b: Atom) -> Tableau:
    if a.formula is None or a.formula != b.formula:
        raise TableauError("mismatched-closure: atoms belong to different formulas")
    return tableau_of(a.formula)


def caller_of(a: Atom) -> frozenset[Formula]:
    return frozenset(g for g in a.members if isinstance(g, Prev) and g.axis == CALLER)


def next_prev(a: Atom, b: Atom) -> bool:
    tab = _common(a, b)
    return all((g in a) == (g.arg in b) for g in tab.xg) and all((g in b) == (g.arg in a) for g in tab.pg)


def abs_next_prev(a: Atom, b: Atom) -> bool:
    tab = _common(a, b)
    return (
        all((g in a) == (g.arg in b) for g in tab.xa)
        and all((g in b) == (g.arg in a) for g in tab.pa)
        and caller_of(a) == caller_of(b)
    )


def terminal_admissible(a: Atom) -> bool:
    tab = tableau_of(a.formula)
    return not any(g in a for g in tab.xg) and XA_TRUE not in a and PINF in a


def hintikka_check(pi: HintikkaWord, phi: Formula | None = None) -> str | None:
    """``None`` when ``pi`` is a (finite) Hintikka sequence, else the first violation."""
    phi = phi if phi is not None else pi.formula
    tab = tableau_of(phi)
    atoms = pi.symbols
    n = len(atoms)
    if n == 0:
        return "empty sequence"
    for i, a in enumerate(atoms):
        if not isinstance(a, Atom) or a not in tab.info:
            return f"position {i}: not an atom of the formula"
    atoms = [tab.atom_of(a.members) for a in atoms]
    if any(g in atoms[0] for g in tab.pg + tab.pa + tab.pc):
        return "property 1 (initial consistency) fails at position 0"
    for i in range(n - 1):
        if not next_prev(atoms[i], atoms[i + 1]):
            return f"property 2 (global next/previous) fails at position {i}"
    nest = skeleton(atoms)
    for i, a in enumerate(atoms):
        b = atoms[i + 1] if i + 1 < n else None
        if CALL not in a:
            if b is None:
                continue
            if RET not in b:
                ok = abs_next_prev(a, b) and (PINF in a) == (PINF in b)
            else:
                ok = XA_TRUE not in a and (PA_TRUE in b) == (nest.match_call[i + 1] is not None)
                if ok and PA_TRUE not in b:
                    ok = PINF in a and PINF in b and not caller_of(b)
        else:
            j = nest.abs_next[i]
            if j is None:
                ok = XA_TRUE not in a and PINF in a
            else:
                ok = abs_next_prev(a, atoms[j]) and (PINF in a) == (PINF in atoms[j])
            if ok and b is not None and RET not in b:
                want = frozenset(g for g in tab.pc if g.arg in a)
                ok = caller_of(b) == want and (XA_TRUE in a) == (PINF not in b) and PA_TRUE not in b
        if not ok:
            return f"property 3 (abstract/caller requirements) fails at position {i}"
    word = TimedWord(atoms, pi.stamps)
    for i, a in enumerate(atoms):
        for clock, g, iv in tab.clocks:
            if (g in a) != (clock_value(word, i, clock) in iv):
                return f"property 4 (real-time requirements) fails at position {i} for {g}"
    if not terminal_admissible(atoms[-1]):
        return f"terminal admissibility fails at position {n - 1}"
    return None


def fairness_check(prefix: Sequence[Atom], loop: Sequence[Atom], phi: Formula | None = None) -> bool:
    """Fairness of the lasso ``prefix · loop^ω``, decided on the loop alone."""
    if not loop:
        raise TableauError("empty loop")
    phi = phi if phi is not None else loop[0].formula
    bases = closure_bases(phi)
    if not any(PINF in a for a in loop):
        return False
    for g in bases:
        if isinstance(g, Until) and g.axis == GLOBAL:
            if not any(g.right in a or g not in a for a in loop):
                return False
        if isinstance(g, Until) and g.axis == ABSTRACT:
            if not any(PINF in a and (g.right in a or g not in a) for a in loop):
                return False
    return True


def induce_hintikka(word: TimedWord, phi: Formula, evaluator: Evaluator | None = None) -> HintikkaWord:
    """The atom sequence recording which closure formulas hold where."""
    ev = evaluator if evaluator is not None and evaluator.word is word else Evaluator(word)
    tab = tableau_of(phi)
    columns = [(g, ev.truth(g)) for g in tab.bases]
    atoms = tuple(Atom([g for g, col in columns if col[i]], phi) for i in range(len(word)))
    return HintikkaWord(atoms, word.stamps, phi)


# ---------------------------------------------------------------------------
# the automaton

_END = {k: ClockId(GLOBAL, PREDICTOR, Prop(k)) for k in RESERVED}


class TableauAutomaton(Ecna):
    """ECNA over atoms whose transitions are generated on demand.

    ``transitions`` materialises the explicit relation, which is only
    practical for small formulas; membership never needs it.
    """

    def __init__(self, phi: Formula):
        self.phi = phi
        self.tableau = tab = tableau_of(phi)
        self.alphabet = "atoms"
        self.states = tab.atoms
        self.initial_order = tab.initial_atoms
        self.initial = frozenset(tab.initial_atoms)
        self.final = frozenset(tab.terminal_atoms)
        self.stack_symbols = tuple(a for a in tab.atoms if tab.info[a].kind == CALL)

    @cached_property
    def transitions(self) -> tuple[Transition, ...]:
        out = []
        tab = self.tableau
        for a in tab.atoms:
            kind = tab.info[a].kind
            if kind == CALL:
                if not tab.push_ok(a):
                    continue
                stacks = [a]
            elif kind == RET:
                stacks = [BOTTOM] if tab.pop_ok(None, a) else []
                stacks += [g for g in self.stack_symbols if tab.pop_ok(g, a)]
            else:
                stacks = [None]
            ends = [[(_END[k], UNDEF) for k in RESERVED]]
            moves = [(tab.info[b].kind, b) for b in tab.successors(a)]
            for clocks in cartesian(*tab.guard_options(a)):
                clocks = list(clocks)
                for st in stacks:
                    mk = {CALL: PUSH, RET: POP, INT: INTERNAL}[kind]
                    for k, b in moves:
                        out.append(Transition(mk, a, a, tuple(clocks + [(_END[k], ANY)]), b, st))
                    out.append(Transition(mk, a, a, tuple(clocks + ends[0]), a, st))
        return tuple(out)

    @cached_property
    def _index(self) -> dict:
        idx: dict = {}
        for t in self.transitions:
            idx.setdefault((t.source, t.symbol), []).append(t)
        return idx

    def start_states(self, word: TimedWord):
        # the input must equal the source state, so only one start can work
        if len(word) and word.symbols[0] in self.initial:
            return (word.symbols[0],)
        return () if len(word) else self.initial_order

    def enabled(self, state, word: TimedWord, i: int, top, val) -> Iterator[Transition]:
        a = word.symbols[i]
        tab = self.tableau
        ia = tab.info.get(a) if isinstance(a, Atom) else None
        if ia is None or a != state:
            return
        if ia.kind == CALL:
            if not tab.push_ok(a):
                return
            kind, stack = PUSH, a
        elif ia.kind == RET:
            stack = top
            if not tab.pop_ok(None if top == BOTTOM else top, a):
                return
            kind = POP
        else:
            kind, stack = INTERNAL, None
        guard = []
        for clock, g, iv in tab.clocks:
            v = val(clock)
            if g in a:
                if v not in iv:
                    return
                guard.append((clock, iv))
            else:
                if v in iv:
                    return
                guard.append((clock, next(p for p in iv.complement() if v in p)))
        if i + 1 < len(word):
            b = word.symbols[i + 1]
            if b not in tab.info or not tab.step_ok(a, b):
                return
            guard.append((_END[tab.info[b].kind], ANY))
            target = b
        else:
            guard.extend((_END[k], UNDEF) for k in RESERVED)
            target = a
        yield Transition(kind, a, a, tuple(guard), target, stack)


def build_automaton(phi: Formula) -> TableauAutomaton:
    return TableauAutomaton(phi)


def project_nonrecursive(auto: Ecna, phi: Formula) -> Ecna:
    """Replace each input atom by its propositions; clocks move to proposition names."""
    if metrics(phi).recursive:
        raise TableauError("recursive-formula: clock arguments must be propositions")

    def clock(c: ClockId) -> ClockId:
        idx = c.index
        if isinstance(idx, Prop):
            idx = idx.name
        elif isinstance(idx, TrueF):
            raise TableauError("recursive-formula: clock indexed by true")
        return ClockId(c.axis, c.direction, idx)

    trans = [
        Transition(t.kind, t.source, t.symbol.props(), tuple((clock(c), iv) for c, iv in t.guard),
                   t.target, t.stack)
        for t in auto.transitions
    ]
    return Ecna(auto.states, auto.initial, auto.final, trans, auto.stack_symbols, "props")
