import random
from itertools import product as cartesian

import pytest

from ecntl.automaton import Ecna
from ecntl.corpus import ALPHABET, ecntl_corpus, grid_words
from ecntl.formulas import Next, Not, Or, Prev, Prop, Since, TrueF, Until, prop_names
from ecntl.logic import Evaluator, closure, closure_bases, models
from ecntl.syntax import parse
from ecntl.tableau import (
    HintikkaWord,
    TableauError,
    abs_next_prev,
    build_automaton,
    caller_of,
    enumerate_atoms,
    fairness_check,
    hintikka_check,
    induce_hintikka,
    next_prev,
    project_nonrecursive,
)
from ecntl.words import ABSTRACT, RESERVED, UNDEF, Interval, TimedWord

WORDS = list(grid_words(3))
SMALL = [parse(t) for t in (
    "p", "p Ug q", "Xa p", "Pc p | Pa q", "p Sa q", "Ng[0,1] p", "Bg(1,inf) p & Xg q", "!(p Ua Pg q)",
)]


def _holds(members, g):
    positive = True
    while isinstance(g, Not):
        g, positive = g.arg, not positive
    return isinstance(g, TrueF) == positive if isinstance(g, TrueF) else (g in members) == positive


def _is_atom(members, bases):
    if sum(Prop(r) in members for r in RESERVED) != 1:
        return False
    xa_true, pa_true = Next(ABSTRACT, TrueF()), Prev(ABSTRACT, TrueF())
    for g in bases:
        inside = g in members
        if isinstance(g, Or) and inside != (_holds(members, g.left) or _holds(members, g.right)):
            return False
        if isinstance(g, Until) and inside != (
            _holds(members, g.right) or (_holds(members, g.left) and Next(g.axis, g) in members)
        ):
            return False
        if isinstance(g, Since) and inside != (
            _holds(members, g.right) or (_holds(members, g.left) and Prev(g.axis, g) in members)
        ):
            return False
        if isinstance(g, Next) and g.axis == ABSTRACT and inside and xa_true not in members:
            return False
        if isinstance(g, Prev) and g.axis == ABSTRACT and inside and pa_true not in members:
            return False
    return True


@pytest.mark.parametrize("f", SMALL[:6], ids=str)
def test_atoms_match_brute_force_subset_filter(f):
    bases = [g for g in closure_bases(f) if not isinstance(g, TrueF)]
    assert len(bases) <= 16
    brute = set()
    for bits in cartesian((False, True), repeat=len(bases)):
        members = frozenset(g for g, b in zip(bases, bits) if b) | {TrueF()}
        if _is_atom(members, bases):
            brute.add(members)
    assert {a.members for a in enumerate_atoms(f)} == brute


@pytest.mark.parametrize("f", SMALL, ids=str)
def test_atom_basics(f):
    cl = closure(f)
    atoms = enumerate_atoms(f)
    assert len(atoms) <= 2 ** (len(cl) / 2)
    for a in atoms:
        assert sum(r in a for r in RESERVED) == 1
        assert all((g in a) != (Not(g) in a) for g in cl)
    assert len(build_automaton(f).states) == len(atoms)


def _atom(f, want):
    return next(a for a in enumerate_atoms(f) if all((g in a) == v for g, v in want.items()))


def test_next_prev_predicates():
    f = parse("Xg p")
    a = _atom(f, {f: True})
    b = _atom(f, {Prop("p"): False})
    assert not next_prev(a, b)
    g = parse("Pc p | q")
    a = _atom(g, {Prev("caller", Prop("p")): True, Prop("int"): True})
    b = _atom(g, {Prev("caller", Prop("p")): False, Prop("int"): True})
    assert caller_of(a) != caller_of(b)
    assert not abs_next_prev(a, b)
    # Xa true and Pa true are always in the closure; with both held the
    # abstract clauses are vacuous
    h = parse("p")
    c = _atom(h, {Next(ABSTRACT, TrueF()): True, Prev(ABSTRACT, TrueF()): True})
    assert next_prev(c, c) and abs_next_prev(c, c)
    with pytest.raises(TableauError):
        next_prev(a, c)


def test_induced_sequences_are_hintikka():
    rng = random.Random(2)
    for f in SMALL + ecntl_corpus(15, seed=4):
        auto = build_automaton(f)
        for w in rng.sample(WORDS, 150):
            ev = Evaluator(w)
            pi = induce_hintikka(w, f, ev)
            keep = prop_names(f) | set(RESERVED)
            assert pi.projection() == TimedWord(tuple(s & keep for s in w.symbols), w.stamps)
            for g in closure_bases(f):
                if g != Prop("pinf"):
                    assert [g in a for a in pi.symbols] == list(ev.truth(g))
            assert (f in pi.symbols[0]) == models(w, f)
            if f in pi.symbols[0]:
                assert hintikka_check(pi) is None
            assert auto.accepts(pi) == models(w, f)


def test_hintikka_diagnostics():
    f = parse("Pg p")
    bad = _atom(f, {f: True})
    assert "property 1" in hintikka_check(HintikkaWord((bad,), (0,), f))
    f = parse("Xa p")
    a0 = _atom(f, {Prop("call"): True, f: True, Next(ABSTRACT, TrueF()): True})
    a1 = _atom(f, {Prop("ret"): True, Prop("p"): False})
    assert "property 3" in hintikka_check(HintikkaWord((a0, a1), (0, 1), f))


def test_figure_word_first_atom():
    w = TimedWord(tuple(ALPHABET[k] for k in (0, 0, 2, 0, 2, 1, 1, 0, 2, 1, 2)), tuple(range(11)))
    a0 = induce_hintikka(w, Prop("call")).symbols[0]
    assert "call" in a0 and Not(Prop("ret")) in a0


def test_fairness():
    f = parse("p Ug q")
    with_pinf = _atom(f, {Prop("pinf"): True})
    no_pinf = _atom(f, {Prop("pinf"): False})
    assert fairness_check([], [_atom(Prop("p"), {Prop("pinf"): True})], Prop("p"))
    assert not fairness_check([], [no_pinf], f)
    stuck = _atom(f, {Prop("pinf"): True, f: True, Prop("p"): True, Prop("q"): False})
    assert not fairness_check([], [stuck], f)
    assert fairness_check([], [_atom(f, {Prop("pinf"): True, Prop("q"): True})], f)
    with pytest.raises(TableauError):
        fairness_check([with_pinf], [], f)


def test_negated_clock_guards_branch_over_the_complement():
    pieces = Interval.closed(2, 5).complement()
    assert pieces == [UNDEF, Interval(0, 2, False, True), Interval(5, None, True)]


def test_projection_of_nonrecursive_formula():
    f = parse("Ng[0,1] p")
    auto = build_automaton(f)
    proj = project_nonrecursive(auto, f)
    assert isinstance(proj, Ecna) and len(proj.states) == len(auto.states)
    for w in WORDS:
        assert proj.accepts(w) == models(w, f)
    with pytest.raises(TableauError):
        project_nonrecursive(build_automaton(parse("Ng[0,1] (p & q)")), parse("Ng[0,1] (p & q)"))


@pytest.mark.parametrize("f", [parse("Xa p"), parse("Ng[0,1] p | Pc q")], ids=str)
def test_projection_is_injective_on_hintikka_words(f):
    atoms = enumerate_atoms(f)
    for w in WORDS[::7]:
        if len(w) > 2:
            continue
        options = [[a for a in atoms if a.props() == s] for s in w.symbols]
        checked = [seq for seq in cartesian(*options) if hintikka_check(HintikkaWord(seq, w.stamps, f)) is None]
        assert len(checked) <= 1
        if checked:
            assert checked[0] == induce_hintikka(w, f).symbols
