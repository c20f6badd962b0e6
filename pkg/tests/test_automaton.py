import json
import random
from fractions import Fraction

import pytest

from ecntl.automaton import (
    BOTTOM,
    INTERNAL,
    POP,
    PUSH,
    AutomatonError,
    Configuration,
    Ecna,
    SchemaError,
    Transition,
    dumps,
    from_doc,
    loads,
    product,
    structurally_equal,
    to_doc,
    universal,
)
from ecntl.corpus import ALPHABET, grid_words, random_ecna
from ecntl.words import ABSTRACT, GLOBAL, RECORDER, ClockId, Interval, TimedWord, parse_clock

C, R, I, IP = ALPHABET
WORDS = list(grid_words(3))
XGP = ClockId(GLOBAL, RECORDER, "p")


def _lang(a):
    return [a.accepts(w) for w in WORDS]


def test_universal_accepts_everything():
    u = universal(ALPHABET)
    assert all(_lang(u))
    assert u.accepts(TimedWord((), ()))


def test_recorder_guard():
    a = Ecna(["s"], ["s"], ["s"], [
        Transition(INTERNAL, "s", IP, (), "s"),
        Transition(INTERNAL, "s", I, ((XGP, Interval.closed(1, 1)),), "s"),
    ])
    assert a.accepts(TimedWord((IP, I), (0, 1)))
    assert not a.accepts(TimedWord((IP, I), (0, Fraction(1, 2))))
    assert not a.accepts(TimedWord((I,), (0,)))


def test_bottom_pop_keeps_stack():
    t = Transition(POP, "s", R, (), "s", BOTTOM)
    a = Ecna(["s"], ["s"], ["s"], [t])
    assert a.step(Configuration("s"), TimedWord((R,), (0,)), 0) == {Configuration("s", (BOTTOM,))}


def test_push_grows_stack_and_failed_guard_blocks():
    push = Transition(PUSH, "s", C, ((XGP, Interval.closed(0, 1)),), "t", "g")
    free = Transition(PUSH, "s", C, (), "t", "h")
    a = Ecna(["s", "t"], ["s"], ["t"], [push, free], ["g", "h"])
    w = TimedWord((IP, C), (0, 1))
    assert a.step(Configuration("s"), w, 1) == {Configuration("t", ("g", BOTTOM)), Configuration("t", ("h", BOTTOM))}
    w = TimedWord((IP, C), (0, 2))
    assert a.step(Configuration("s"), w, 1) == {Configuration("t", ("h", BOTTOM))}


def test_transition_invariants():
    with pytest.raises(AutomatonError):
        Transition(PUSH, "s", C, (), "s", BOTTOM)
    with pytest.raises(AutomatonError):
        Transition(INTERNAL, "s", C, (), "s")
    with pytest.raises(AutomatonError):
        Ecna(["s"], ["s"], ["s"], [], [BOTTOM])


def test_alphabet_mismatch():
    with pytest.raises(AutomatonError):
        universal(ALPHABET).accepts(TimedWord(((1, 2),), (0,)))
    with pytest.raises(AutomatonError):
        product(universal(ALPHABET), Ecna(["s"], ["s"], ["s"], alphabet="atoms"))


def test_product_identities():
    rng = random.Random(7)
    for _ in range(4):
        a = random_ecna(rng)
        assert _lang(product(a, universal(ALPHABET))) == _lang(a)
        assert _lang(product(a, loads(dumps(a)))) == _lang(a)


def test_product_is_intersection():
    rng = random.Random(11)
    for _ in range(3):
        a1, a2 = random_ecna(rng), random_ecna(rng)
        p = product(a1, a2)
        assert _lang(p) == [x and y for x, y in zip(_lang(a1), _lang(a2))]


def test_accepted_runs_respect_the_stack_discipline():
    rng = random.Random(5)
    for _ in range(3):
        a = random_ecna(rng)
        for w in WORDS:
            run = a.run(w)
            if run is None:
                continue
            for k, (before, after) in enumerate(zip(run, run[1:])):
                kind = "call" if "call" in w.symbols[k] else "ret" if "ret" in w.symbols[k] else "int"
                d = len(after.stack) - len(before.stack)
                assert d == {"call": 1, "int": 0}.get(kind, d)
                assert kind != "ret" or d in (0, -1)
                assert after.stack[-1] == BOTTOM and after.stack.count(BOTTOM) == 1


def test_accepts_is_repeatable():
    a = random_ecna(random.Random(3))
    assert _lang(a) == _lang(a)


def test_weakening_guards_never_shrinks_language():
    rng = random.Random(9)
    for _ in range(3):
        a = random_ecna(rng)
        loose = Ecna(a.states, a.initial_order, a.final,
                     [Transition(t.kind, t.source, t.symbol, (), t.target, t.stack) for t in a.transitions],
                     a.stack_symbols)
        assert all(y or not x for x, y in zip(_lang(a), _lang(loose)))


def test_document_round_trip():
    a = random_ecna(random.Random(1))
    assert structurally_equal(from_doc(json.loads(json.dumps(to_doc(a)))), a)
    p = product(a, a)
    assert structurally_equal(loads(dumps(p)), p)


def test_schema_errors_name_the_path():
    doc = to_doc(random_ecna(random.Random(2)))
    del doc["initial"]
    with pytest.raises(SchemaError, match=r"\$\.initial"):
        from_doc(doc)
    doc = to_doc(random_ecna(random.Random(2)))
    doc["transitions"][0]["guard"] = [{"clock": "yc:p", "interval": "[0,1]"}]
    with pytest.raises(SchemaError, match=r"\$\.transitions\[0\]\.guard\[0\]"):
        from_doc(doc)


def test_clock_keys():
    assert parse_clock("xa:p") == ClockId(ABSTRACT, RECORDER, "p")
    with pytest.raises(ValueError):
        parse_clock("yc:p")
    with pytest.raises(ValueError):
        parse_clock("zg:p")
