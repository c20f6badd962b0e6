import pytest
from hypothesis import given
from hypothesis import strategies as st

from ecntl.corpus import ecntl_corpus, nmitl_corpus, random_ecntl
from ecntl.formulas import (
    FALSE,
    TRUE,
    And,
    Next,
    NextClock,
    Not,
    Or,
    Prev,
    PrevClock,
    Prop,
    TSince,
    TUntil,
    Until,
    logic_of,
    metrics,
    size,
)
from ecntl.syntax import ParseError, parse, to_text
from ecntl.words import ABSTRACT, CALLER, GLOBAL, UNDEF, Interval

p, q = Prop("p"), Prop("q")


def test_clock_and_conjunction():
    f = parse("call & Na[1,1] ret")
    assert f == And(Prop("call"), NextClock(ABSTRACT, Interval.closed(1, 1), Prop("ret")))


def test_timed_until():
    assert parse("p Ug[0,3] q") == TUntil(GLOBAL, Interval.closed(0, 3), p, q)
    assert logic_of(parse("p Ug[0,3] q")) == "nmtl"


@pytest.mark.parametrize("text", ["Nc[0,1] p", "Xc p", "p Uc q", "p Uc[0,1] q", "p &", "(p", "Ng p", "p Ug[0,inf] q"])
def test_syntax_errors(text):
    with pytest.raises(ParseError):
        parse(text)


def test_error_carries_position():
    with pytest.raises(ParseError) as err:
        parse("p &\n  & q")
    assert "2" in str(err.value)


def test_precedence():
    # unary > clock > until > and > or > implies
    assert parse("!p Ug q") == Until(GLOBAL, Not(p), q)
    assert parse("p & q | p") == Or(And(p, q), p)
    assert parse("p | q -> p") == Or(Not(Or(p, q)), p)
    assert parse("p -> q -> p") == parse("p -> (q -> p)")
    assert parse("Xg p Ug q") == Until(GLOBAL, Next(GLOBAL, p), q)
    assert parse("Bc undef p") == PrevClock(CALLER, UNDEF, p)
    assert parse("Pc p & q") == And(Prev(CALLER, p), q)


def test_constants():
    assert parse("true") is TRUE
    assert parse("false") == FALSE
    assert parse("p Sa[2,inf) q") == TSince(ABSTRACT, Interval(2, None), p, q)


def test_hash_consing():
    assert parse("p | q") is Or(p, q)
    assert size(parse("(p | q) & (p | q)")) == size(parse("p | q")) + 3


def test_metrics():
    m = metrics(parse("Ng[0,3] p"))
    assert not m.recursive and m.constants == frozenset({3})
    assert metrics(parse("Ng[0,3] (p & q)")).recursive
    assert metrics(parse("p Ug q")).constants == frozenset()


def test_corpus_round_trip():
    for f in ecntl_corpus(100, seed=3) + nmitl_corpus(50, seed=3):
        assert parse(to_text(f)) is f


@given(st.integers(0, 10**6))
def test_random_round_trip(seed):
    import random

    f = random_ecntl(random.Random(seed), 4)
    assert parse(to_text(f)) is f
