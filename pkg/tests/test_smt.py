import random

import pytest

from ecntl.corpus import random_ecntl
from ecntl.logic import models
from ecntl.minsky import M1, M2, encode_machine, in_l_halt
from ecntl.smt import nmtl_bounded_sat
from ecntl.solver import bounded_sat
from ecntl.syntax import parse


def test_singular_intervals():
    w = nmtl_bounded_sat(parse("p & (true Ug[1,1] q) & !(true Ug[0,1) q)"), 3)
    assert w is not None and models(w, parse("p & (true Ug[1,1] q)"))
    assert nmtl_bounded_sat(parse("(true Ug[1,1] q) & !(true Ug[0,inf) q)"), 3) is None


def test_abstract_and_caller_axes():
    f = parse("call & (true Ua[2,2] ret) & (true Ug[0,1] (int & (true Sc[0,1] call)))")
    w = nmtl_bounded_sat(f, 4)
    assert w is not None and models(w, f)


def test_agrees_with_the_tableau_on_ecntl():
    rng = random.Random(4)
    for _ in range(15):
        f = random_ecntl(rng, 2)
        assert (nmtl_bounded_sat(f, 2) is None) == (bounded_sat(f, 2) is None)


@pytest.mark.parametrize("m,n", [(M1, 6), (M2, 4)], ids=["M1", "M2"])
def test_minsky_encoding_solved(m, n):
    w = nmtl_bounded_sat(encode_machine(m), n)
    assert w is not None and in_l_halt(m, w)


def test_contradiction():
    assert nmtl_bounded_sat(parse("p & !p"), 2) is None
