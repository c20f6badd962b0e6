"""Acceptance suite: the seven end-to-end criteria at full scale.

Run under pytest, or directly with ``python tests/test_acceptance.py`` to get
one PASS/FAIL line per criterion.  The corpus is fixed by the seeds below.
"""

from __future__ import annotations

import random
import sys
import time
from functools import lru_cache

import pytest

from ecntl.automaton import product
from ecntl.corpus import ecntl_corpus, grid_words, nmitl_corpus, random_ecna
from ecntl.formulas import size
from ecntl.logic import Evaluator, closure, models
from ecntl.minsky import (
    M1,
    M2,
    M3,
    M4,
    MUTATIONS,
    NoHalt,
    encode_machine,
    halting_witness,
    in_l_halt,
    mutate,
    run_machine,
)
from ecntl.nmtl import ecntl_to_nmitl, eval_nmtl, nmitl_to_ecntl
from ecntl.schemas import separating_language_formula, unit_pair
from ecntl.solver import bounded_sat
from ecntl.tableau import build_automaton, enumerate_atoms, induce_hintikka

SEED = 1
N_FORMULAS = 200
N_NMITL = 100
MAX_CLOSURE = 24
MAX_LEN = 4
# fixed before measuring: a closure base per subformula plus its unwinding,
# plus seven bases every closure has, both polarities
C_CLOSURE = 18
C_TRANSLATION = 12

RESULTS: dict[int, tuple[bool, str]] = {}


def _record(k: int, ok: bool, detail: str) -> None:
    RESULTS[k] = (ok, detail)


@lru_cache(maxsize=None)
def corpus():
    return tuple(ecntl_corpus(N_FORMULAS, seed=SEED, max_closure=MAX_CLOSURE))


@lru_cache(maxsize=None)
def words():
    return tuple(grid_words(MAX_LEN))


@lru_cache(maxsize=None)
def grid_agreement():
    """Criterion 1 sweep; also notes which formulas have a grid model."""
    fs = corpus()
    autos = [build_automaton(f) for f in fs]
    has_model = [False] * len(fs)
    mismatches = []
    pairs = 0
    shared, last = {}, None
    t0 = time.perf_counter()
    for w in words():
        if w.symbols != last:
            shared, last = {}, w.symbols
        ev = Evaluator(w, shared)
        for k, (f, a) in enumerate(zip(fs, autos)):
            m = ev.truth(f)[0]
            has_model[k] |= m
            if a.accepts(induce_hintikka(w, f, ev)) != m:
                mismatches.append((f, w))
            pairs += 1
    return pairs, mismatches, tuple(has_model), time.perf_counter() - t0


def criterion_1():
    pairs, bad, _, secs = grid_agreement()
    ok = not bad and len(corpus()) >= 200 and secs <= 600
    return ok, f"{pairs} pairs, {len(bad)} disagreements, {secs:.0f}s"


def criterion_2():
    _, _, has_model, _ = grid_agreement()
    t0 = time.perf_counter()
    invalid, missing, found = 0, 0, 0
    for f, needed in zip(corpus(), has_model):
        w = bounded_sat(f, MAX_LEN)
        if w is not None:
            found += 1
            invalid += not models(w.word, f)
        elif needed:
            missing += 1
    secs = time.perf_counter() - t0
    ok = invalid == 0 and missing == 0 and secs <= 600
    return ok, f"{found} witnesses, {invalid} invalid, {missing} missed grid-satisfiable formulas, {secs:.0f}s"


def criterion_3():
    t0 = time.perf_counter()
    w = bounded_sat(separating_language_formula(), 4)
    secs = time.perf_counter() - t0
    if w is None:
        return False, f"no witness up to length 4 ({secs:.1f}s)"
    pair = unit_pair(w.word)
    ok = pair is not None and w.word.stamps[pair[1]] - w.word.stamps[pair[0]] == 1 and secs <= 10
    return ok, f"witness of length {len(w.word)}, matched pair {pair}, {secs:.2f}s"


def criterion_4():
    t0 = time.perf_counter()
    pairs = [(f, nmitl_to_ecntl(f)) for f in nmitl_corpus(N_NMITL, seed=SEED)]
    pairs += [(f, ecntl_to_nmitl(f)) for f in corpus()]
    ratio = max(size(g) / size(f) for f, g in pairs)
    bad = 0
    shared, last = {}, None
    for w in words():
        if w.symbols != last:
            shared, last = {}, w.symbols
        ev = Evaluator(w, shared)
        for f, g in pairs:
            bad += ev.truth(f) != ev.truth(g)
    # eval_nmtl is the same evaluator behind an NMTL-only guard
    w0 = words()[-1]
    guard_ok = all(eval_nmtl(w0, 0, f) == Evaluator(w0).holds(f, 0) for f, _ in pairs[:N_NMITL])
    secs = time.perf_counter() - t0
    ok = bad == 0 and guard_ok and ratio <= C_TRANSLATION and secs <= 300
    return ok, f"{len(pairs)} formulas, {bad} disagreeing truth tables, max size ratio {ratio:.2f} (c={C_TRANSLATION}), {secs:.0f}s"


def criterion_5():
    t0 = time.perf_counter()
    problems = []
    for name, m in (("M1", M1), ("M2", M2), ("M4", M4)):
        comp = run_machine(m, 50)
        if isinstance(comp, NoHalt):
            problems.append(f"{name} did not halt")
            continue
        w = halting_witness(m, comp)
        phi = encode_machine(m)
        if not eval_nmtl(w, 0, phi):
            problems.append(f"{name} witness rejected")
        if not in_l_halt(m, w):
            problems.append(f"{name} witness outside L_halt")
        for kind in MUTATIONS:
            if eval_nmtl(mutate(m, comp, kind), 0, phi):
                problems.append(f"{name} {kind} mutation accepted")
    if not isinstance(run_machine(M3, 50), NoHalt):
        problems.append("M3 halted")
    phi3 = encode_machine(M3)
    comp1 = run_machine(M1, 50)
    tried = [halting_witness(M1, comp1)] + [mutate(M1, comp1, k) for k in MUTATIONS]
    if any(eval_nmtl(w, 0, phi3) for w in tried):
        problems.append("M3 encoding accepted an M1 word")
    secs = time.perf_counter() - t0
    ok = not problems and secs <= 60
    return ok, (", ".join(problems) or "all witnesses accepted, all mutations rejected") + f", {secs:.1f}s"


def criterion_6():
    t0 = time.perf_counter()
    bad = []
    ratio = 0.0
    for f in corpus():
        atoms = enumerate_atoms(f)
        states = build_automaton(f).states
        cl = len(closure(f))
        ratio = max(ratio, cl / size(f))
        if len(states) != len(atoms) or len(atoms) > 2 ** (cl / 2):
            bad.append(f)
    secs = time.perf_counter() - t0
    ok = not bad and ratio <= C_CLOSURE and secs <= 60
    return ok, f"{len(bad)} violations, max closure/size {ratio:.1f} (c'={C_CLOSURE}), {secs:.1f}s"


def criterion_7():
    t0 = time.perf_counter()
    rng = random.Random(SEED)
    bad = accepted = 0
    for _ in range(20):
        a1, a2 = random_ecna(rng), random_ecna(rng)
        p = product(a1, a2)
        for w in words():
            inside = p.accepts(w)
            accepted += inside
            bad += inside != (a1.accepts(w) and a2.accepts(w))
    secs = time.perf_counter() - t0
    ok = bad == 0 and secs <= 300
    return ok, f"20 pairs x {len(words())} words, {bad} disagreements ({accepted} accepted by the product), {secs:.0f}s"


CRITERIA = {
    1: ("oracle-tableau agreement", criterion_1),
    2: ("solver soundness and bounded completeness", criterion_2),
    3: ("separating language end to end", criterion_3),
    4: ("NMITL translations", criterion_4),
    5: ("counter machine encoder", criterion_5),
    6: ("structural size bounds", criterion_6),
    7: ("product correctness", criterion_7),
}


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k):
    name, fn = CRITERIA[k]
    ok, detail = fn()
    _record(k, ok, detail)
    print(f"criterion {k} ({name}): {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for k, (name, fn) in CRITERIA.items():
        ok, detail = fn()
        failed += not ok
        print(f"criterion {k} ({name}): {'PASS' if ok else 'FAIL'}: {detail}", flush=True)
    sys.exit(1 if failed else 0)
