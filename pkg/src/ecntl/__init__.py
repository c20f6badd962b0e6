"""Event-clock nested temporal logic: timed words with call/return structure,
ECNTL and NMTL semantics, the tableau construction into event-clock nested
automata, bounded satisfiability and model checking, and the counter-machine
reduction for NMTL.
"""

from .automaton import Ecna, Transition, accepts, product
from .formulas import Formula, size
from .logic import closure, eval_formula, models
from .minsky import MinskyMachine, encode_machine, halting_witness, run_machine
from .nmtl import ecntl_to_nmitl, eval_nmtl, models_nmtl, nmitl_to_ecntl
from .solver import bounded_mc, bounded_sat
from .syntax import parse, to_text
from .tableau import build_automaton, enumerate_atoms, induce_hintikka
from .words import Interval, TimedWord

__all__ = [
    "Ecna",
    "Formula",
    "Interval",
    "MinskyMachine",
    "TimedWord",
    "Transition",
    "accepts",
    "bounded_mc",
    "bounded_sat",
    "build_automaton",
    "closure",
    "ecntl_to_nmitl",
    "encode_machine",
    "enumerate_atoms",
    "eval_formula",
    "eval_nmtl",
    "halting_witness",
    "induce_hintikka",
    "models",
    "models_nmtl",
    "nmitl_to_ecntl",
    "parse",
    "product",
    "run_machine",
    "size",
    "to_text",
]
