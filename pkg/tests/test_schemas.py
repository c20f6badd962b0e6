from hypothesis import given
from hypothesis import strategies as st

from ecntl.corpus import GRID
from ecntl.logic import models
from ecntl.schemas import (
    in_separating_language,
    local_response,
    separating_language_formula,
    stack_security,
    total_correctness,
    unit_pair,
)
from ecntl.solver import bounded_sat
from ecntl.words import TimedWord

KINDS = (frozenset({"call"}), frozenset({"ret"}), frozenset({"int"}))


@st.composite
def words(draw):
    syms = draw(st.lists(st.sampled_from(KINDS), min_size=1, max_size=6))
    stamps = sorted(draw(st.lists(st.sampled_from(GRID), min_size=len(syms), max_size=len(syms))))
    return TimedWord(tuple(syms), tuple(stamps))


@given(words())
def test_formula_defines_the_language(w):
    assert models(w, separating_language_formula()) == in_separating_language(w)


def test_separating_language_examples():
    w = TimedWord.of(({"call"}, 0), ({"call"}, 0), ({"ret"}, 1), ({"ret"}, 3))
    assert in_separating_language(w) and unit_pair(w) == (1, 2)
    assert not in_separating_language(TimedWord.of(({"call"}, 0), ({"ret"}, 2)))
    assert not in_separating_language(TimedWord.of(({"call"}, 0), ({"ret"}, 1), ({"call"}, 1), ({"ret"}, 2)))


def test_solver_finds_a_unit_pair():
    w = bounded_sat(separating_language_formula(), 4).word
    i, j = unit_pair(w)
    assert w.stamps[j] - w.stamps[i] == 1


def test_local_response():
    w = TimedWord.of(({"int", "p", "cA"}, 0), ({"call"}, 1), ({"ret"}, 2), ({"int", "q"}, 3))
    assert models(w, local_response(3))
    assert not models(w, local_response(2))


def test_stack_security():
    ok = TimedWord.of(({"call", "pB"}, 0), ({"call", "pA"}, 1))
    late = TimedWord.of(({"call", "pB"}, 0), ({"call", "pA"}, 5))
    bare = TimedWord.of(({"call", "pA"}, 0),)
    assert models(ok, stack_security(2))
    assert not models(late, stack_security(2))
    assert not models(bare, stack_security(2))


def test_total_correctness_needs_the_return():
    pending = TimedWord.of(({"call", "p", "pA"}, 0), ({"int", "q"}, 1))
    assert not models(pending, total_correctness(5))
