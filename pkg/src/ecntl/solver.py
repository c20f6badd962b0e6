"""Bounded satisfiability and model checking through the tableau.

A candidate model is an atom sequence accepted by the untimed part of the
tableau automaton.  Its real-time obligations become difference constraints
on the timestamps, solved exactly with Bellman-Ford over (weight, strictness)
pairs: a strict bound ``c`` is the pair ``(c, -1)``, read as ``c - ε`` for an
infinitesimal ``ε``, and pairs are compared lexicographically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .automaton import BOTTOM, POP, PUSH, Configuration, Ecna
from .formulas import Formula, neg
from .logic import models
from .tableau import Atom, HintikkaWord, Tableau, build_automaton, tableau_of
from .words import CALL, RECORDER, RET, Interval, TimedWord, clock_reference, skeleton

Constraint = tuple  # (j, i, bound, strict): τ_i − τ_j ≤ bound, or < when strict


class BudgetExceeded(RuntimeError):
    """The configured number of search nodes was used up."""


class Infeasible(ValueError):
    """An obligation needs a reference position that does not exist."""


@dataclass
class DiffSystem:
    n: int
    constraints: list = field(default_factory=list)

    def add(self, j: int, i: int, bound: Fraction, strict: bool = False) -> None:
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexError("constraint index out of range")
        self.constraints.append((j, i, Fraction(bound), strict))

    def add_delay(self, early: int, late: int, iv: Interval) -> None:
        """``τ_late − τ_early ∈ iv``."""
        if iv.hi is not None:
            self.add(early, late, iv.hi, iv.hi_open)
        if iv.lo or iv.lo_open:
            self.add(late, early, -iv.lo, iv.lo_open)

    def copy(self) -> "DiffSystem":
        return DiffSystem(self.n, list(self.constraints))

    def edges(self) -> list[Constraint]:
        """User constraints plus monotonicity and ``τ_0 ≥ 0``; node ``n`` is the origin."""
        out = list(self.constraints)
        out.extend((i + 1, i, Fraction(0), False) for i in range(self.n - 1))
        if self.n:
            out.append((0, self.n, Fraction(0), False))
        return out

    def check(self, stamps: Sequence[Fraction]) -> bool:
        t = list(stamps) + [Fraction(0)]
        for j, i, b, strict in self.edges():
            d = t[i] - t[j]
            if d > b or (strict and d == b):
                return False
        return True


@dataclass(frozen=True)
class Certificate:
    """A cycle of constraints whose bounds add up to something unsatisfiable."""

    cycle: tuple
    total: Fraction
    strict: bool

    def valid(self) -> bool:
        total = sum((c[2] for c in self.cycle), Fraction(0))
        strict = any(c[3] for c in self.cycle)
        heads = [c[1] for c in self.cycle]
        tails = [c[0] for c in self.cycle]
        closed = heads == tails[1:] + tails[:1]
        return closed and (total < 0 or (total == 0 and strict))


def _pair(b: Fraction, strict: bool) -> tuple:
    return (b, -1 if strict else 0)


def _bellman_ford(nodes: int, edges: list[Constraint], source: int | None):
    """Pair distances from ``source`` (``None``: a virtual source to every node).

    Returns ``(dist, None)`` or ``(None, cycle)``.
    """
    inf = None
    dist = [(Fraction(0), 0) if source is None else inf for _ in range(nodes)]
    if source is not None:
        dist[source] = (Fraction(0), 0)
    pred: list[Constraint | None] = [None] * nodes
    last = None
    for _ in range(nodes):
        last = None
        for e in edges:
            j, i, b, strict = e
            if dist[j] is None:
                continue
            w = _pair(b, strict)
            cand = (dist[j][0] + w[0], dist[j][1] + w[1])
            if dist[i] is None or cand < dist[i]:
                dist[i] = cand
                pred[i] = e
                last = i
        if last is None:
            return dist, None
    # still relaxing after |V| rounds: walk back into the cycle
    v = last
    for _ in range(nodes):
        v = pred[v][0]
    cycle, u = [], v
    while True:
        e = pred[u]
        cycle.append(e)
        u = e[0]
        if u == v:
            break
    cycle.reverse()
    return None, cycle


def _simplest(lo: Fraction | None, lo_strict: bool, hi: Fraction | None, hi_strict: bool) -> Fraction:
    """Smallest-denominator rational in the interval (smallest value on ties)."""
    lo = Fraction(0) if lo is None else lo
    q = 1
    while True:
        p = math.ceil(lo * q)
        if lo_strict and Fraction(p, q) == lo:
            p += 1
        x = Fraction(p, q)
        if hi is None or x < hi or (x == hi and not hi_strict):
            return x
        q += 1


def feasible(sys: DiffSystem, snap: bool = True) -> tuple[Fraction, ...] | Certificate:
    """Timestamps satisfying ``sys``, or an infeasibility certificate."""
    if sys.n == 0:
        return ()
    nodes = sys.n + 1
    edges = sys.edges()
    dist, cycle = _bellman_ford(nodes, edges, None)
    if cycle is not None:
        total = sum((c[2] for c in cycle), Fraction(0))
        return Certificate(tuple(cycle), total, any(c[3] for c in cycle))
    if not snap:
        return _from_pairs(dist, edges, sys.n)
    origin = sys.n
    fixed: list[Constraint] = []
    out = []
    for i in range(sys.n):
        cur = edges + fixed
        up, _ = _bellman_ford(nodes, cur, origin)
        rev = [(i2, j2, b, s) for (j2, i2, b, s) in cur]
        down, _ = _bellman_ford(nodes, rev, origin)
        hi = up[i]
        lo = down[i]
        x = _simplest(
            None if lo is None else -lo[0],
            lo is not None and lo[1] < 0,
            None if hi is None else hi[0],
            hi is not None and hi[1] < 0,
        )
        fixed += [(origin, i, x, False), (i, origin, -x, False)]
        out.append(x)
    stamps = tuple(out)
    if not sys.check(stamps):
        raise RuntimeError("snapped timestamps violate the constraint system")
    return stamps


def _from_pairs(dist, edges, n) -> tuple[Fraction, ...]:
    """Turn pair potentials into rationals by choosing a small enough ε."""
    eps = Fraction(1)
    for j, i, b, _strict in edges:
        cv, kv = dist[i]
        cu, ku = dist[j]
        gap = b - (cv - cu)
        if gap > 0 and kv - ku > 0:
            eps = min(eps, gap / (2 * (kv - ku)))
    t = [c + eps * k for c, k in dist]
    base = t[n]
    return tuple(x - base for x in t[:n])


# ---------------------------------------------------------------------------
# obligations


@dataclass
class Compiled:
    """Fixed delay constraints plus disjunctive choices over complement pieces."""

    n: int
    fixed: list = field(default_factory=list)  # (early, late, Interval)
    choices: list = field(default_factory=list)  # [[(early, late, Interval), ...], ...]

    def base(self) -> DiffSystem:
        sys = DiffSystem(self.n)
        for e, l, iv in self.fixed:
            sys.add_delay(e, l, iv)
        return sys

    def systems(self) -> Iterator[DiffSystem]:
        """Every branch combination, pruning infeasible prefixes."""

        def go(k: int, sys: DiffSystem):
            if isinstance(feasible(sys, snap=False), Certificate):
                return
            if k == len(self.choices):
                yield sys
                return
            for e, l, iv in self.choices[k]:
                nxt = sys.copy()
                nxt.add_delay(e, l, iv)
                yield from go(k + 1, nxt)

        yield from go(0, self.base())


def _obligations(tab: Tableau, atoms: Sequence[Atom], out: Compiled) -> None:
    for i, a in enumerate(atoms):
        for clock, g, iv in tab.clocks:
            j = clock_reference(atoms, i, clock)
            early, late = (i, j) if j is not None and j > i else (j, i)
            if g in a:
                if iv.undef:
                    if j is not None:
                        raise Infeasible(f"{g} at {i}: reference position {j} exists")
                    continue
                if j is None:
                    raise Infeasible(f"{g} at {i}: no reference position")
                out.fixed.append((early, late, iv))
            else:
                if j is None:
                    if iv.undef:
                        raise Infeasible(f"¬{g} at {i}: no reference position")
                    continue
                pieces = [p for p in iv.complement() if not p.undef]
                if not pieces:
                    raise Infeasible(f"¬{g} at {i}: every delay lies in {iv}")
                if len(pieces) == 1:
                    out.fixed.append((early, late, pieces[0]))
                else:
                    out.choices.append([(early, late, p) for p in pieces])


def compile_constraints(atoms: Sequence[Atom], phi: Formula) -> Compiled:
    """Raises :class:`Infeasible` when a required reference position is missing."""
    out = Compiled(len(atoms))
    _obligations(tableau_of(phi), atoms, out)
    return out


# ---------------------------------------------------------------------------
# search


@dataclass(frozen=True)
class Witness:
    word: TimedWord
    hintikka: HintikkaWord
    run: tuple  # configurations of the tableau automaton over ``hintikka``


class _Budget:
    def __init__(self, limit: int):
        self.limit, self.used = limit, 0

    def tick(self) -> None:
        self.used += 1
        if self.used > self.limit:
            raise BudgetExceeded(f"search budget of {self.limit} nodes exceeded")


def _alternatives(i: int, j: int | None, iv: Interval, positive: bool) -> list:
    """Ways to meet one obligation: ``None`` (nothing to add) or a delay constraint."""
    if j is None:
        ok = iv.undef if positive else not iv.undef
        return [None] if ok else []
    early, late = (i, j) if j > i else (j, i)
    if positive:
        return [] if iv.undef else [(early, late, iv)]
    if iv.undef:
        return [None]
    return [(early, late, p) for p in iv.complement() if not p.undef]


def _consistent(sys: DiffSystem) -> bool:
    return _bellman_ford(sys.n + 1, sys.edges(), None)[1] is None


def _reference(nest, seq: Sequence, i: int, clock) -> int | None:
    walk = nest.earlier(clock.axis, i) if clock.direction == RECORDER else nest.later(clock.axis, i)
    for j in walk:
        if clock.index in seq[j]:
            return j
    return None


def _branch(sys: DiffSystem, alts: list, k: int = 0) -> Iterator[DiffSystem]:
    if k == len(alts):
        yield sys
        return
    for opt in alts[k]:
        if opt is None:
            yield from _branch(sys, alts, k + 1)
            continue
        nxt = DiffSystem(sys.n, list(sys.constraints))
        nxt.add_delay(*opt)
        if _consistent(nxt):
            yield from _branch(nxt, alts, k + 1)


def _search(
    tab: Tableau, length: int, budget: _Budget, model: Ecna | None = None
) -> Iterator[tuple[list[Atom], DiffSystem]]:
    """Atom sequences of ``length`` accepted by the tableau (and by ``model``
    on their projection), each with a consistent timestamp system.

    Real-time obligations are resolved as soon as their reference position is
    known: recorders at once, predictors when the reference is placed or at the
    end of the word.  Complement pieces are branched on immediately.
    """
    info = tab.info
    seq: list[Atom] = []
    index: dict[tuple, list] = {}
    if model is not None:
        for t in model.transitions:
            index.setdefault((t.source, t.symbol), []).append(t)

    def tab_stack(a: Atom, stack: tuple) -> tuple | None:
        k = info[a].kind
        if k == CALL:
            return stack + (a,) if tab.push_ok(a) else None
        if k == RET:
            top = stack[-1] if stack else None
            return stack[:-1] if tab.pop_ok(top, a) else None
        return stack

    def model_moves(states, a: Atom, mstack: tuple):
        sym = a.props()
        for q in states:
            for t in index.get((q, sym), ()):
                if t.kind == PUSH:
                    yield t, mstack + (t.stack,)
                elif t.kind == POP:
                    top = mstack[-1] if mstack else BOTTOM
                    if t.stack == top:
                        yield t, mstack if top == BOTTOM else mstack[:-1]
                else:
                    yield t, mstack

    def resolve(k: int, sys: DiffSystem, pending: tuple, guard: tuple):
        nest = skeleton(seq)
        a = seq[k]
        alts, still = [], []
        fresh = [(k, clock, iv, g in a) for clock, g, iv in tab.clocks]
        fresh += [(k, clock, iv, True) for clock, iv in guard]
        for ob in fresh:
            if ob[1].direction == RECORDER:
                alts.append(_alternatives(k, _reference(nest, seq, k, ob[1]), ob[2], ob[3]))
            else:
                still.append(ob)
        waiting = []
        for ob in pending + tuple(still):
            j = _reference(nest, seq, ob[0], ob[1])
            if j is None and k + 1 < length:
                waiting.append(ob)
            else:
                alts.append(_alternatives(ob[0], j, ob[2], ob[3]))
        if any(not alt for alt in alts):
            return
        for s in _branch(sys, alts):
            yield s, tuple(waiting)

    def go(k: int, stack: tuple, states, mstack: tuple, sys: DiffSystem, pending: tuple):
        last = k == length - 1
        candidates = tab.initial_atoms if k == 0 else tab.successors(seq[-1])
        for b in candidates:
            if last and not info[b].terminal:
                continue
            st = tab_stack(b, stack)
            if st is None:
                continue
            moves = [(None, None)] if model is None else list(model_moves(states, b, mstack))
            for t, ms in moves:
                if last and t is not None and t.target not in model.final:
                    continue
                budget.tick()
                seq.append(b)
                for sys2, pend2 in resolve(k, sys, pending, t.guard if t else ()):
                    if last:
                        yield list(seq), sys2
                    else:
                        yield from go(k + 1, st, (t.target,) if t else None, ms, sys2, pend2)
                seq.pop()

    start = model.initial_order if model is not None else None
    yield from go(0, (), start, (), DiffSystem(length), ())


def _witness(phi: Formula, atoms: list[Atom], stamps: tuple) -> Witness:
    hw = HintikkaWord(tuple(atoms), stamps, phi)
    word = hw.projection()
    run = build_automaton(phi).run(hw)
    if run is None:
        raise RuntimeError("tableau automaton rejects its own skeleton")
    return Witness(word, hw, tuple(run))


def _stamps(sys: DiffSystem) -> tuple[Fraction, ...]:
    res = feasible(sys)
    if isinstance(res, Certificate):
        raise RuntimeError("search kept an inconsistent constraint system")
    return res


def bounded_sat(phi: Formula, maxlen: int, budget: int = 10**6) -> Witness | None:
    """A model of ``phi`` with at most ``maxlen`` positions, or ``None``.

    ``None`` only means that no model exists up to the bound.
    """
    if maxlen < 1:
        raise ValueError("maxlen must be at least 1")
    tab = tableau_of(phi)
    counter = _Budget(budget)
    for length in range(1, maxlen + 1):
        for atoms, sys in _search(tab, length, counter):
            w = _witness(phi, atoms, _stamps(sys))
            if not models(w.word, phi):
                raise RuntimeError(f"witness {w.word} does not satisfy {phi}")
            return w
    return None


def bounded_mc(model: Ecna, phi: Formula, maxlen: int, budget: int = 10**6) -> Witness | None:
    """A word accepted by ``model`` that violates ``phi``, or ``None`` up to ``maxlen``.

    The returned witness carries the tableau run of ``¬phi``.
    """
    if model.alphabet != "props":
        raise ValueError("alphabet-mismatch: the model must read proposition sets")
    bad = neg(phi)
    tab = tableau_of(bad)
    counter = _Budget(budget)
    for length in range(1, maxlen + 1):
        for atoms, sys in _search(tab, length, counter, model):
            w = _witness(bad, atoms, _stamps(sys))
            if not model.accepts(w.word):
                raise RuntimeError("counterexample is not accepted by the model")
            if models(w.word, phi):
                raise RuntimeError("counterexample satisfies the property")
            return w
    return None


def run_trace(run: Sequence[Configuration]) -> list[dict]:
    """Run configurations in the automaton document vocabulary."""
    from .automaton import _symbol_doc

    out = []
    for cfg in run:
        out.append(
            {
                "state": _symbol_doc(cfg.state) if isinstance(cfg.state, Atom) else cfg.state,
                "stack": [g if g == BOTTOM else _symbol_doc(g) for g in cfg.stack],
            }
        )
    return out
