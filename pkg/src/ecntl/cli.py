"""Command-line front end.

Every verb prints one JSON document per line (or a short human rendering with
``--pretty``).  Exit codes: 0 yes/ok/witness found, 1 no/none up to the bound,
2 usage or parse error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Any, Callable, Optional

from . import automaton as ecna
from .formulas import FormulaError, logic_of, size
from .logic import closure, eval_formula, models
from .minsky import (
    MachineError,
    NoHalt,
    WitnessError,
    encode_machine,
    halting_witness,
    load_machine,
    machine_from_doc,
    run_machine,
)
from .nmtl import ecntl_to_nmitl, is_nmitl, nmitl_to_ecntl
from .solver import BudgetExceeded, bounded_mc, bounded_sat, run_trace
from .syntax import parse, to_text
from .tableau import build_automaton, enumerate_atoms
from .words import WordError, validate_word, word_from_doc, word_to_doc

OK, NO, USAGE, BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror}") from None


def _formula_text(args) -> str:
    if args.stdin:
        text = sys.stdin.read()
    elif args.formula is not None:
        text = args.formula
    elif args.file is not None:
        text = _read(args.file)
    else:
        raise UsageError("give a formula with -f FILE, -e TEXT or --stdin")
    # documents produced by other verbs carry the formula under "formula"
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            return json.loads(stripped)["formula"]
        except (ValueError, KeyError, TypeError):
            raise UsageError("stdin document has no 'formula' field") from None
    return text


def _formula(args):
    return parse(_formula_text(args))


def _json(path: str) -> Any:
    try:
        return json.loads(_read(path))
    except ValueError as e:
        raise UsageError(f"{path}: invalid JSON: {e}") from None


def _word(path: str):
    w = word_from_doc(_json(path))
    problem = validate_word(w)
    if problem:
        raise WordError(problem)
    return w


# ---------------------------------------------------------------------------
# verbs: each returns (exit code, document)


def cmd_eval(args):
    f, w = _formula(args), _word(args.word)
    if args.position is not None:
        if not 0 <= args.position < len(w):
            raise UsageError(f"position {args.position} out of range for length {len(w)}")
        v = eval_formula(w, args.position, f)
        return (OK if v else NO), {"holds": v, "position": args.position}
    v = models(w, f)
    return (OK if v else NO), {"models": v}


def _sat(f, max_len: int, budget: int):
    """Pick the engine: the tableau for ECNTL and NMITL, SMT otherwise."""
    if logic_of(f) in ("ecntl", "both"):
        w = bounded_sat(f, max_len, budget)
        return "tableau", (w.word if w else None)
    if is_nmitl(f):
        w = bounded_sat(nmitl_to_ecntl(f), max_len, budget)
        return "tableau", (w.word if w else None)
    from .smt import nmtl_bounded_sat

    return "smt", nmtl_bounded_sat(f, max_len, timeout_ms=budget)


def cmd_sat(args):
    f = _formula(args)
    engine, w = _sat(f, args.max_len, args.budget)
    if w is None:
        return NO, {"sat": False, "max_len": args.max_len, "engine": engine}
    return OK, {"sat": True, "engine": engine, "witness": word_to_doc(w)}


def cmd_mc(args):
    a = ecna.from_doc(_json(args.automaton))
    f = _formula(args)
    w = bounded_mc(a, f, args.max_len, args.budget)
    if w is None:
        return OK, {"holds": True, "max_len": args.max_len}
    return NO, {"holds": False, "counterexample": word_to_doc(w.word), "run": run_trace(w.run)}


def cmd_tableau(args):
    f = _formula(args)
    auto = build_automaton(f)
    atoms = enumerate_atoms(f)
    doc = {
        "closure": len(closure(f)),
        "size": size(f),
        "states": len(atoms),
        "initial": len(auto.initial),
        "final": len(auto.final),
    }
    if args.atoms:
        doc["atoms"] = [sorted(to_text(m) for m in a.members) for a in atoms]
    return OK, doc


def cmd_translate(args):
    f = _formula(args)
    target = args.to or ("ecntl" if logic_of(f) == "nmtl" else "nmitl")
    g = nmitl_to_ecntl(f) if target == "ecntl" else ecntl_to_nmitl(f)
    return OK, {"formula": to_text(g), "logic": target, "size": size(g), "source_size": size(f)}


def cmd_minsky_encode(args):
    m = load_machine(_read(args.machine))
    f = encode_machine(m)
    return OK, {"formula": to_text(f), "size": size(f)}


def cmd_minsky_witness(args):
    m = load_machine(_read(args.machine))
    comp = run_machine(m, args.fuel)
    if isinstance(comp, NoHalt):
        return NO, {"halts": False, "fuel": args.fuel, "reason": "no-halt-within-fuel"}
    w = halting_witness(m, comp)
    return OK, {
        "halts": True,
        "computation": [[c.label, c.n1, c.n2] for c in comp],
        "witness": word_to_doc(w),
    }


_VALIDATORS: dict[str, Callable[[str], None]] = {}


def _validator(kind: str):
    def deco(fn):
        _VALIDATORS[kind] = fn
        return fn

    return deco


@_validator("formula")
def _v_formula(path: str) -> None:
    parse(_read(path))


@_validator("word")
def _v_word(path: str) -> None:
    _word(path)


@_validator("automaton")
def _v_automaton(path: str) -> None:
    ecna.from_doc(_json(path))


@_validator("machine")
def _v_machine(path: str) -> None:
    machine_from_doc(_json(path))


def cmd_validate(args):
    try:
        _VALIDATORS[args.kind](args.path)
    except (FormulaError, WordError, ecna.AutomatonError, MachineError, UsageError) as e:
        return NO, {"valid": False, "kind": args.kind, "error": str(e)}
    return OK, {"valid": True, "kind": args.kind}


# ---------------------------------------------------------------------------


def _formula_opts(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("-f", "--file", help="formula file")
    g.add_argument("-e", "--formula", help="formula text")
    g.add_argument("--stdin", action="store_true", help="read the formula (or a document with one) from stdin")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ecntl", description=__doc__.splitlines()[0])
    p.add_argument("--pretty", action="store_true", help="human-readable output")
    p.add_argument("--seed", type=int, default=0, help="seed for any randomness (default 0)")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("eval", help="evaluate a formula on a timed word")
    _formula_opts(s)
    s.add_argument("-w", "--word", required=True)
    s.add_argument("--position", type=int)
    s.set_defaults(run=cmd_eval)

    for name, fn, help_ in (("sat", cmd_sat, "bounded satisfiability"), ("mc", cmd_mc, "bounded model checking")):
        s = sub.add_parser(name, help=help_)
        _formula_opts(s)
        s.add_argument("--max-len", type=int, default=4)
        s.add_argument("--budget", type=int, default=10**6, help="search nodes (SMT: milliseconds)")
        if name == "mc":
            s.add_argument("-a", "--automaton", required=True)
        s.set_defaults(run=fn)

    s = sub.add_parser("tableau", help="size of the tableau automaton")
    _formula_opts(s)
    s.add_argument("--atoms", action="store_true", help="list the atoms")
    s.set_defaults(run=cmd_tableau)

    s = sub.add_parser("translate", help="NMITL(0,inf) <-> ECNTL")
    _formula_opts(s)
    s.add_argument("--to", choices=("ecntl", "nmitl"))
    s.set_defaults(run=cmd_translate)

    s = sub.add_parser("minsky-encode", help="NMTL encoding of a counter machine")
    s.add_argument("machine")
    s.set_defaults(run=cmd_minsky_encode)

    s = sub.add_parser("minsky-witness", help="timed word of a halting computation")
    s.add_argument("machine")
    s.add_argument("--fuel", type=int, default=50)
    s.set_defaults(run=cmd_minsky_witness)

    s = sub.add_parser("validate", help="check a document")
    s.add_argument("kind", choices=sorted(_VALIDATORS))
    s.add_argument("path")
    s.set_defaults(run=cmd_validate)
    return p


def _render(doc: dict) -> str:
    lines = []
    for k, v in doc.items():
        if k in ("witness", "counterexample") and isinstance(v, list):
            v = " ".join("{%s}@%s" % (",".join(r["props"]), r["t"]) for r in v)
        elif isinstance(v, list):
            v = json.dumps(v, ensure_ascii=False)
        lines.append(f"{k}: {v}")
    return "\n".join(lines)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    random.seed(args.seed)
    try:
        code, doc = args.run(args)
    except BudgetExceeded as e:
        code, doc = BUDGET, {"error": "budget-exceeded", "detail": str(e)}
    except (UsageError, FormulaError, WordError, ecna.AutomatonError, MachineError, WitnessError, ValueError) as e:
        code, doc = USAGE, {"error": type(e).__name__, "detail": str(e)}
    out = sys.stdout if code < USAGE else sys.stderr
    print(_render(doc) if args.pretty else json.dumps(doc, ensure_ascii=False), file=out)
    return code


if __name__ == "__main__":
    sys.exit(main())
