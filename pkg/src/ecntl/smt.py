"""Bounded satisfiability for arbitrary NMTL formulas through an SMT encoding.

The tableau only covers ECNTL (and NMITL through translation).  Formulas with
singular intervals, like the counter-machine encodings, are handled here: for
each length the nesting structure, the propositions, the timestamps and the
truth of every subformula become solver variables, and a model is read back
as a timed word that is re-checked by the evaluator.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

import z3

from .formulas import (
    Formula,
    Not,
    Or,
    Prop,
    TrueF,
    TSince,
    TUntil,
    prop_names,
)
from .logic import models
from .nmtl import ecntl_to_nmitl
from .solver import BudgetExceeded
from .words import ABSTRACT, CALL, GLOBAL, INT, PINF, RET, Interval, TimedWord


def _in(iv: Interval, d) -> z3.BoolRef:
    parts = []
    if iv.lo is not None:
        parts.append(d > iv.lo if iv.lo_open else d >= iv.lo)
    if iv.hi is not None:
        parts.append(d < iv.hi if iv.hi_open else d <= iv.hi)
    return z3.And(*parts) if parts else z3.BoolVal(True)


class _Encoding:
    def __init__(self, f: Formula, n: int):
        self.n = n
        self.s = z3.Solver()
        s = self.s
        self.kind = {k: [z3.Bool(f"{k}_{i}") for i in range(n)] for k in (CALL, RET, INT)}
        call, ret, intl = self.kind[CALL], self.kind[RET], self.kind[INT]
        for i in range(n):
            s.add(z3.PbEq([(call[i], 1), (ret[i], 1), (intl[i], 1)], 1))
        self.t = [z3.Real(f"t_{i}") for i in range(n)]
        if n:
            s.add(self.t[0] >= 0)
        for i in range(n - 1):
            s.add(self.t[i] <= self.t[i + 1])
        names = prop_names(f) - {CALL, RET, INT, PINF}
        self.props = {p: [z3.Bool(f"p_{p}_{i}") for i in range(n)] for p in sorted(names)}
        self._nesting()
        self.truth: dict[Formula, list] = {}
        root = self.of(f)
        s.add(root[0])

    def _nesting(self) -> None:
        n, s = self.n, self.s
        call, ret = self.kind[CALL], self.kind[RET]
        h = [z3.Int(f"h_{i}") for i in range(n + 1)]
        s.add(h[0] == 0)
        for i in range(n):
            s.add(h[i + 1] == z3.If(call[i], h[i] + 1, z3.If(z3.And(ret[i], h[i] > 0), h[i] - 1, h[i])))
        F = z3.BoolVal(False)
        match = [[F] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                above = [h[k + 1] > h[i] for k in range(i + 1, j)]
                match[i][j] = z3.And(call[i], ret[j], h[j + 1] == h[i], *above)
        nxt = [[F] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1:
                    nxt[i][j] = z3.Or(match[i][j], z3.And(z3.Not(call[i]), z3.Not(ret[j])))
                else:
                    nxt[i][j] = match[i][j]
        # pending[j][i]: call j has not been matched by the end of position i
        caller = [[F] * n for _ in range(n)]
        pending = {}
        for j in range(n):
            for i in range(j + 1, n):
                pending[j, i] = z3.And(call[j], *[h[k + 1] > h[j] for k in range(j + 1, i + 1)])
        for i in range(n):
            for j in range(i):
                inner = [z3.Not(pending[k, i]) for k in range(j + 1, i)]
                caller[i][j] = z3.And(pending[j, i], *inner)
        matched = [z3.Or(*[match[j][k] for k in range(j + 1, n)]) for j in range(n)]
        self.pinf = []
        for i in range(n):
            has = [z3.And(caller[i][j], matched[j]) for j in range(i)]
            self.pinf.append(z3.Not(z3.Or(*has)) if has else z3.BoolVal(True))
        self.match, self.abs_next, self.caller = match, nxt, caller

    # successor relations per axis; entries are (k, condition)
    def _forward(self, axis: str, j: int):
        if axis == GLOBAL:
            return [(j + 1, z3.BoolVal(True))] if j + 1 < self.n else []
        return [(k, self.abs_next[j][k]) for k in range(j + 1, self.n)]

    def _backward(self, axis: str, j: int):
        if axis == GLOBAL:
            return [(j - 1, z3.BoolVal(True))] if j > 0 else []
        if axis == ABSTRACT:
            return [(k, self.abs_next[k][j]) for k in range(j)]
        return [(k, self.caller[j][k]) for k in range(j)]

    def of(self, f: Formula) -> list:
        out = self.truth.get(f)
        if out is None:
            out = self.truth[f] = self._build(f)
        return out

    def _fresh(self, name: str, exprs: list) -> list:
        vs = [z3.Bool(f"{name}_{i}") for i in range(len(exprs))]
        for v, e in zip(vs, exprs):
            self.s.add(v == e)
        return vs

    def _build(self, f: Formula) -> list:
        n = self.n
        if isinstance(f, TrueF):
            return [z3.BoolVal(True)] * n
        if isinstance(f, Prop):
            if f.name in self.kind:
                return self.kind[f.name]
            if f.name == PINF:
                return self.pinf
            return self.props[f.name]
        if isinstance(f, Not):
            return [z3.Not(x) for x in self.of(f.arg)]
        if isinstance(f, Or):
            a, b = self.of(f.left), self.of(f.right)
            return self._fresh(f"or{id(f)}", [z3.Or(x, y) for x, y in zip(a, b)])
        if isinstance(f, (TUntil, TSince)):
            return self._timed(f)
        raise TypeError(f"unsupported node {type(f).__name__}")

    def _timed(self, f) -> list:
        n, s = self.n, self.s
        a, b = self.of(f.left), self.of(f.right)
        future = isinstance(f, TUntil)
        step = self._forward if future else self._backward
        order = range(n - 1, -1, -1) if future else range(n)
        tag = f"u{id(f)}"
        untimed = f.interval.lo == 0 and not f.interval.lo_open and f.interval.hi is None
        if untimed:
            # the witness may sit anywhere, so one table serves every start
            w = [z3.Bool(f"{tag}_{j}") for j in range(n)]
            for j in order:
                s.add(w[j] == z3.Or(b[j], z3.And(a[j], z3.Or(*[z3.And(c, w[k]) for k, c in step(f.axis, j)]))))
            return self._fresh(tag + "r", [z3.Or(*[z3.And(c, w[k]) for k, c in step(f.axis, i)]) for i in range(n)])
        out = []
        for i in range(n):
            w = {}
            span = range(i + 1, n) if future else range(i)
            for j in (reversed(span) if future else span):
                d = (self.t[j] - self.t[i]) if future else (self.t[i] - self.t[j])
                nxt = [z3.And(c, w[k]) for k, c in step(f.axis, j) if k in w]
                w[j] = z3.Bool(f"{tag}_{i}_{j}")
                s.add(w[j] == z3.Or(z3.And(b[j], _in(f.interval, d)), z3.And(a[j], z3.Or(*nxt))))
            out.append(z3.Or(*[z3.And(c, w[k]) for k, c in step(f.axis, i) if k in w]))
        return self._fresh(tag + "r", out)

    def word(self, model: z3.ModelRef) -> TimedWord:
        syms, stamps = [], []
        for i in range(self.n):
            sym = {k for k, vs in self.kind.items() if z3.is_true(model.eval(vs[i], model_completion=True))}
            sym |= {p for p, vs in self.props.items() if z3.is_true(model.eval(vs[i], model_completion=True))}
            syms.append(frozenset(sym))
            v = model.eval(self.t[i], model_completion=True)
            stamps.append(Fraction(v.as_fraction()))
        return TimedWord(tuple(syms), tuple(stamps))


def nmtl_bounded_sat(f: Formula, maxlen: int, timeout_ms: Optional[int] = None) -> Optional[TimedWord]:
    """Shortest model of length at most ``maxlen``, or None.

    ECNTL operators are first rewritten into NMTL.  Raises ``BudgetExceeded``
    when the solver gives up within ``timeout_ms`` for some length.
    """
    g = ecntl_to_nmitl(f)
    for n in range(1, maxlen + 1):
        enc = _Encoding(g, n)
        if timeout_ms is not None:
            enc.s.set("timeout", timeout_ms)
        res = enc.s.check()
        if res == z3.unknown:
            raise BudgetExceeded(f"solver gave up at length {n}")
        if res == z3.sat:
            word = enc.word(enc.s.model())
            if not models(word, f):
                raise RuntimeError("SMT witness fails the evaluator")
            return word
    return None


__all__ = ["nmtl_bounded_sat"]
