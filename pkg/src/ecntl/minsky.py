"""Two-counter machines and their encoding as future NMTL formulas.

A halting computation ``C1 ... Ck`` is written as the well-matched word
``(call, σ)·(ret, σ^R)`` where ``σ`` concatenates the codes ``ℓ c1^n1 c2^n2``.
Equal counter values are enforced through exact time distance 1 between a
counter unit and its partner in the next code, on the call side for lower
bounds and on the (reversed) return side for upper bounds.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Any, Mapping, Optional, Sequence

from .formulas import (
    ECNTL_NODES,
    FALSE,
    TRUE,
    And,
    TSince,
    Formula,
    Implies,
    Not,
    Prop,
    TUntil,
    conj,
    disj,
    subformulas,
)
from .nmtl import eval_nmtl
from .words import ABSTRACT, ANY, CALL, GLOBAL, PINF, RET, Interval, TimedWord, classify

COUNTERS = ("c1", "c2")
_LABEL = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_TAKEN = {CALL, RET, "int", PINF, *COUNTERS, "true", "false", "undef"}


class MachineError(ValueError):
    pass


@dataclass(frozen=True)
class Inc:
    counter: int
    goto: str


@dataclass(frozen=True)
class Dec:
    counter: int
    goto_nonzero: str
    goto_zero: str


@dataclass(frozen=True)
class MachineConfig:
    label: str
    n1: int = 0
    n2: int = 0

    def count(self, h: int) -> int:
        return self.n1 if h == 1 else self.n2


@dataclass(frozen=True)
class MinskyMachine:
    labels: tuple[str, ...]
    init: str
    halt: str
    inst: Mapping[str, Inc | Dec]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "inst", dict(self.inst))
        if len(set(self.labels)) != len(self.labels):
            raise MachineError("duplicate labels")
        for l in self.labels:
            if not _LABEL.match(l) or l in _TAKEN or re.fullmatch(r"[XPNBUS][a-z]", l):
                raise MachineError(f"label {l!r} is not usable as a proposition")
        lab = set(self.labels)
        if self.init not in lab or self.halt not in lab:
            raise MachineError("init and halt must be labels")
        if set(self.inst) != lab - {self.halt}:
            raise MachineError("instructions must cover exactly the non-halting labels")
        for l, ins in self.inst.items():
            if ins.counter not in (1, 2):
                raise MachineError(f"{l}: counter must be 1 or 2")
            targets = (ins.goto,) if isinstance(ins, Inc) else (ins.goto_nonzero, ins.goto_zero)
            if any(t not in lab for t in targets):
                raise MachineError(f"{l}: goto target is not a label")
            if isinstance(ins, Dec) and ins.goto_nonzero == ins.goto_zero:
                raise MachineError(f"{l}: decrement branches must differ")

    def step(self, cfg: MachineConfig) -> MachineConfig:
        ins = self.inst[cfg.label]
        n = [cfg.n1, cfg.n2]
        h = ins.counter - 1
        if isinstance(ins, Inc):
            n[h] += 1
            return MachineConfig(ins.goto, *n)
        if n[h] > 0:
            n[h] -= 1
            return MachineConfig(ins.goto_nonzero, *n)
        return MachineConfig(ins.goto_zero, *n)

    def successor_ok(self, c: MachineConfig, d: MachineConfig) -> bool:
        return c.label != self.halt and self.step(c) == d


@dataclass(frozen=True)
class NoHalt:
    """Fuel ran out before the halting label was reached."""

    fuel: int
    prefix: tuple[MachineConfig, ...]


def run_machine(machine: MinskyMachine, fuel: int) -> tuple[MachineConfig, ...] | NoHalt:
    if fuel < 1:
        raise MachineError("fuel must be positive")
    cfg = MachineConfig(machine.init)
    out = [cfg]
    for _ in range(fuel):
        if cfg.label == machine.halt:
            return tuple(out)
        cfg = machine.step(cfg)
        out.append(cfg)
    if cfg.label == machine.halt:
        return tuple(out)
    return NoHalt(fuel, tuple(out))


# ---------------------------------------------------------------------------
# Machine documents


def machine_to_doc(m: MinskyMachine) -> dict:
    inst = {}
    for l, ins in m.inst.items():
        if isinstance(ins, Inc):
            inst[l] = {"op": "inc", "counter": ins.counter, "goto": ins.goto}
        else:
            inst[l] = {
                "op": "dec",
                "counter": ins.counter,
                "goto_nonzero": ins.goto_nonzero,
                "goto_zero": ins.goto_zero,
            }
    return {"labels": list(m.labels), "init": m.init, "halt": m.halt, "inst": inst}


def machine_from_doc(doc: Any) -> MinskyMachine:
    try:
        inst: dict[str, Inc | Dec] = {}
        for l, d in doc["inst"].items():
            if d["op"] == "inc":
                inst[l] = Inc(int(d["counter"]), d["goto"])
            elif d["op"] == "dec":
                inst[l] = Dec(int(d["counter"]), d["goto_nonzero"], d["goto_zero"])
            else:
                raise MachineError(f"{l}: unknown op {d['op']!r}")
        return MinskyMachine(tuple(doc["labels"]), doc["init"], doc["halt"], inst)
    except (KeyError, TypeError, AttributeError) as e:
        raise MachineError(f"malformed machine document: {e}") from None


def load_machine(text: str) -> MinskyMachine:
    return machine_from_doc(json.loads(text))


def dump_machine(m: MinskyMachine) -> str:
    return json.dumps(machine_to_doc(m), indent=2)


# ---------------------------------------------------------------------------
# Sample machines

M1 = MinskyMachine(("init", "halt"), "init", "halt", {"init": Inc(1, "halt")})
M2 = MinskyMachine(("init", "halt"), "init", "halt", {"init": Dec(1, "init", "halt")})
M3 = MinskyMachine(("init", "halt"), "init", "halt", {"init": Inc(1, "init")})
M4 = MinskyMachine(
    ("l0", "l1", "l2", "halt"),
    "l0",
    "halt",
    {"l0": Inc(1, "l1"), "l1": Inc(2, "l2"), "l2": Dec(1, "l2", "halt")},
)
SAMPLES = {"M1": M1, "M2": M2, "M3": M3, "M4": M4}


# ---------------------------------------------------------------------------
# Formula helpers (future NMTL only)


def _ev(f: Formula, iv: Interval = ANY) -> Formula:
    """Strict eventually within ``iv`` on the global path."""
    return TUntil(GLOBAL, iv, TRUE, f)


def _alw(f: Formula, iv: Interval = ANY) -> Formula:
    return Not(_ev(Not(f), iv))


def _next(f: Formula, axis: str = GLOBAL) -> Formula:
    return TUntil(axis, ANY, FALSE, f)


def _always(f: Formula) -> Formula:
    return And(f, _alw(f))


def _eventually(f: Formula) -> Formula:
    return disj(f, _ev(f))


ONE = Interval.closed(1, 1)
UNIT = Interval.closed(0, 1)


def _counter_rules(h: int, grow: bool) -> Formula:
    """Partner rules inside one code for counter ``h``.

    With ``grow`` every ``c_h`` needs a partner whose global successor is also
    ``c_h``; without it only the successor of a ``c_h`` followed by ``c_h``
    needs one.  The other counter always needs a plain partner.
    """
    ch, co = Prop(COUNTERS[h - 1]), Prop(COUNTERS[2 - h])
    keep = Implies(co, _ev(co, ONE))
    if grow:
        rule = Implies(ch, _ev(And(ch, _next(ch)), ONE))
    else:
        rule = Implies(And(ch, _next(ch)), _next(_ev(ch, ONE)))
    return And(keep, rule)


def phi_wm() -> Formula:
    c, r = Prop(CALL), Prop(RET)
    return conj(
        c,
        _next(Not(_next(TRUE)), ABSTRACT),
        _always(Not(Prop("int"))),
        Not(_eventually(And(r, _eventually(c)))),
    )


def phi_ltl(m: MinskyMachine) -> Formula:
    c = Prop(CALL)
    labs = [Prop(l) for l in m.labels]
    cs = [Prop(x) for x in COUNTERS]
    letters = labs + cs
    lab = disj(*labs)
    counter = disj(*cs)
    parts = []
    # every position carries exactly one letter, mirrored by its matching return
    parts.append(_always(disj(*letters)))
    for i, x in enumerate(letters):
        for y in letters[i + 1:]:
            parts.append(_always(Not(And(x, y))))
        parts.append(_always(Implies(And(c, x), _next(x, ABSTRACT))))
    # call-codes read ℓ c1* c2*
    parts.append(_always(Implies(And(c, Prop("c2")), Not(_next(Prop("c1"))))))
    # initialization and halting
    parts.append(And(Prop(m.init), _next(And(c, lab))))
    parts.append(_eventually(And(c, Prop(m.halt))))
    parts.append(_always(Implies(And(c, Prop(m.halt)), Not(_ev(And(c, lab))))))

    def next_label(f: Formula) -> Formula:
        return TUntil(GLOBAL, ANY, And(c, counter), conj(c, lab, f))

    def has(h: int) -> Formula:
        left = FALSE if h == 1 else And(c, Prop("c1"))
        return TUntil(GLOBAL, ANY, left, And(c, Prop(COUNTERS[h - 1])))

    for l, ins in m.inst.items():
        here = And(c, Prop(l))
        if isinstance(ins, Inc):
            then = next_label(And(Prop(ins.goto), has(ins.counter)))
        else:
            h = ins.counter
            zero = And(Not(has(h)), next_label(And(Prop(ins.goto_zero), Not(has(h)))))
            nonzero = And(has(h), next_label(Prop(ins.goto_nonzero)))
            then = disj(zero, nonzero)
        parts.append(_always(Implies(here, then)))
    return conj(*parts)


def phi_time(m: MinskyMachine) -> Formula:
    lab = disj(*(Prop(l) for l in m.labels))
    parts = [_always(Not(_ev(TRUE, Interval.closed(0, 0))))]
    for t in (CALL, RET):
        tl = And(Prop(t), lab)
        parts.append(_always(Implies(And(tl, _ev(tl)), _ev(tl, ONE))))
    for l, ins in m.inst.items():
        inc = isinstance(ins, Inc)
        # lower bounds on the call side
        parts.append(
            _always(
                Implies(And(Prop(CALL), Prop(l)), _alw(_counter_rules(ins.counter, inc), UNIT))
            )
        )
        # upper bounds on the return side, skipping the first return-code
        for l2 in m.labels:
            pre = conj(Prop(RET), Prop(l2), _ev(Prop(l), Interval.closed(2, 2)))
            parts.append(_always(Implies(pre, _alw(_counter_rules(ins.counter, not inc), UNIT))))
    return conj(*parts)


def encode_machine(m: MinskyMachine) -> Formula:
    """Future NMTL formula whose models' untimed parts are exactly L_halt."""
    return conj(phi_wm(), phi_ltl(m), phi_time(m))


def is_future(f: Formula) -> bool:
    return not any(isinstance(g, (TSince, *ECNTL_NODES)) for g in subformulas(f))


# ---------------------------------------------------------------------------
# Witnesses


class WitnessError(ValueError):
    pass


def _code(cfg: MachineConfig) -> list[str]:
    return [cfg.label] + ["c1"] * cfg.n1 + ["c2"] * cfg.n2


def _slots(configs: Sequence[MachineConfig], grow_front: bool) -> list[tuple[list[int], list[int]]]:
    """Integer slots per code and counter; partners share a slot.

    Codes are walked in order.  A larger count adds fresh slots at the back
    (or the front when ``grow_front``); a smaller one drops from the other end.
    """
    out = []
    blocks = [[], []]
    lo = hi = 0
    for idx, cfg in enumerate(configs):
        for h in (0, 1):
            b, want = blocks[h], cfg.count(h + 1)
            while len(b) < want:
                if grow_front:
                    lo -= 1
                    b.insert(0, lo)
                else:
                    hi += 1
                    b.append(hi)
            while len(b) > want:
                if grow_front:
                    b.pop()
                else:
                    b.pop(0)
        out.append((list(blocks[0]), list(blocks[1])))
    return out


def _offsets(slots: list[tuple[list[int], list[int]]], first: int, second: int):
    """Map slots to offsets in (0, 1); counter ``first`` occupies the lower half."""
    ranks = []
    for h in (0, 1):
        used = sorted({s for code in slots for s in code[h]})
        ranks.append({s: k for k, s in enumerate(used, 1)})
    span = [len(r) + 1 for r in ranks]

    def off(h: int, s: int) -> Fraction:
        base = Fraction(0) if h == first else Fraction(1, 2)
        return base + Fraction(ranks[h][s], 2 * span[h])

    return off


def layout(configs: Sequence[MachineConfig]) -> TimedWord:
    """The L_halt-shaped word of a configuration sequence, without validation."""
    k = len(configs)
    syms: list[frozenset] = []
    stamps: list[Fraction] = []
    call_slots = _slots(configs, grow_front=False)
    off = _offsets(call_slots, 0, 1)
    for i, (cfg, code) in enumerate(zip(configs, call_slots)):
        syms.append(frozenset({CALL, cfg.label}))
        stamps.append(Fraction(i))
        for h in (0, 1):
            for s in code[h]:
                syms.append(frozenset({CALL, COUNTERS[h]}))
                stamps.append(i + off(h, s))
    # the return part runs from the last code back to the first
    rev = list(reversed(configs))
    ret_slots = _slots(rev, grow_front=True)
    roff = _offsets(ret_slots, 1, 0)
    for j, (cfg, code) in enumerate(zip(rev, ret_slots)):
        base = Fraction(k + j)
        for h in (1, 0):
            for s in code[h]:
                syms.append(frozenset({RET, COUNTERS[h]}))
                stamps.append(base + roff(h, s))
        syms.append(frozenset({RET, cfg.label}))
        stamps.append(base + 1)
    return TimedWord(tuple(syms), tuple(stamps))


def halting_witness(m: MinskyMachine, computation: Sequence[MachineConfig]) -> TimedWord:
    comp = tuple(computation)
    if len(comp) < 2 or comp[0] != MachineConfig(m.init) or comp[-1].label != m.halt:
        raise WitnessError("invalid-computation: not a halting computation from the initial configuration")
    for a, b in zip(comp, comp[1:]):
        if not m.successor_ok(a, b):
            raise WitnessError(f"invalid-computation: {a} does not step to {b}")
    word = layout(comp)
    if not eval_nmtl(word, 0, encode_machine(m)):
        raise WitnessError("constructed word does not satisfy the encoding")
    return word


# ---------------------------------------------------------------------------
# Direct L_halt membership


def letters_of(word: TimedWord) -> Optional[list[tuple[str, str]]]:
    """(kind, letter) per position, or None if some position is malformed."""
    out = []
    for s in word.symbols:
        k = classify(s)
        rest = [x for x in s if x not in (CALL, RET, "int")]
        if len(rest) != 1:
            return None
        out.append((k, rest[0]))
    return out


def parse_codes(m: MinskyMachine, letters: Sequence[str]) -> Optional[list[MachineConfig]]:
    """Split ``ℓ c1^n1 c2^n2 ...`` into configurations."""
    codes: list[MachineConfig] = []
    i = 0
    while i < len(letters):
        if letters[i] not in m.labels:
            return None
        label, i = letters[i], i + 1
        n = [0, 0]
        for h, name in enumerate(COUNTERS):
            while i < len(letters) and letters[i] == name:
                n[h] += 1
                i += 1
        codes.append(MachineConfig(label, *n))
    return codes


def in_l_halt(m: MinskyMachine, word: TimedWord) -> bool:
    pairs = letters_of(word)
    if not pairs or len(pairs) % 2:
        return False
    half = len(pairs) // 2
    kinds = [k for k, _ in pairs]
    if kinds != [CALL] * half + [RET] * half:
        return False
    sigma = [x for _, x in pairs[:half]]
    if [x for _, x in pairs[half:]] != sigma[::-1]:
        return False
    codes = parse_codes(m, sigma)
    if not codes or len(codes) < 2:
        return False
    # initialization: σ starts with ℓ_init followed directly by a label
    if codes[0] != MachineConfig(m.init):
        return False
    if m.halt not in (c.label for c in codes):
        return False
    for idx, (c, d) in enumerate(zip(codes, codes[1:])):
        if c.label == m.halt:
            return False
        ins = m.inst[c.label]
        h = ins.counter
        if isinstance(ins, Inc):
            if d.label != ins.goto or d.count(h) == 0:
                return False
        elif d.label == ins.goto_zero:
            if c.count(h) or d.count(h):
                return False
        elif d.label != ins.goto_nonzero or c.count(h) == 0:
            return False
        if d.label == m.halt:
            continue
        if c.count(3 - h) != d.count(3 - h):
            return False
        if isinstance(ins, Inc) and d.count(h) != c.count(h) + 1:
            return False
        if isinstance(ins, Dec) and d.label == ins.goto_nonzero and d.count(h) != c.count(h) - 1:
            return False
    return True


# ---------------------------------------------------------------------------
# Mutations of a witness, each of which must leave L_halt or break timing

MUTATIONS = ("label-consecution", "counter-count", "well-matching", "label-gap")


def mutate(m: MinskyMachine, computation: Sequence[MachineConfig], kind: str) -> TimedWord:
    comp = list(computation)
    if kind == "label-consecution":
        wrong = next(l for l in m.labels if l != comp[1].label)
        comp[1] = replace(comp[1], label=wrong)
        return layout(comp)
    if kind == "counter-count":
        i = 1 if len(comp) > 2 else 0
        comp[i] = replace(comp[i], n1=comp[i].n1 + 1)
        return layout(comp)
    word = layout(comp)
    if kind == "well-matching":
        return TimedWord(word.symbols[:-1], word.stamps[:-1])
    if kind == "label-gap":
        # push everything from the second call label onwards a quarter later
        cut = next(j for j in range(1, len(word)) if word.symbols[j] & set(m.labels))
        q = Fraction(1, 4)
        return TimedWord(word.symbols, word.stamps[:cut] + tuple(t + q for t in word.stamps[cut:]))
    raise ValueError(f"unknown mutation {kind!r}")
