"""CNF emission: clause forms for the basic constraints, solver id allocation
and the VarMap used to decode solutions."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable

from .core import FALSE, TRUE, Constraint, IntVar, LiteralStore, Model


@dataclass
class Cnf:
    num_vars: int
    clauses: list[tuple[int, ...]] = field(default_factory=list)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines += [" ".join(map(str, cl + (0,))) for cl in self.clauses]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class VarMapEntry:
    name: str
    kind: str
    lo: int
    hi: int
    # signed solver ids, or True/False for constant bits
    tokens: tuple = ()


@dataclass
class VarMap:
    entries: list[VarMapEntry] = field(default_factory=list)

    def lookup(self, name: str) -> VarMapEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def to_text(self) -> str:
        lines = []
        for e in self.entries:
            toks = ["T" if t is True else "F" if t is False else str(t) for t in e.tokens]
            lines.append(" ".join([e.name, e.kind, str(e.lo), str(e.hi)] + toks))
        return "\n".join(lines) + ("\n" if lines else "")

    @staticmethod
    def from_text(text: str) -> VarMap:
        entries = []
        for line in text.splitlines():
            parts = line.split()
            if not parts:
                continue
            name, kind, lo, hi, *toks = parts
            tokens = tuple(True if t == "T" else False if t == "F" else int(t) for t in toks)
            entries.append(VarMapEntry(name, kind, int(lo), int(hi), tokens))
        return VarMap(entries)


class ClauseSink:
    """Collects clauses over internal literals, folding constants on the way."""

    def __init__(self, store: LiteralStore):
        self.store = store
        self.clauses: list[tuple[int, ...]] = []
        self._seen: set[frozenset] = set()
        self.unsat = False

    def add(self, lits: Iterable[int]) -> None:
        resolve = self.store.resolve
        out: list[int] = []
        for x in lits:
            r = resolve(x)
            if r == TRUE or -r in out:
                return
            if r != FALSE and r not in out:
                out.append(r)
        if not out:
            self.unsat = True
            return
        key = frozenset(out)
        if key not in self._seen:
            self._seen.add(key)
            self.clauses.append(tuple(out))

    def fresh(self) -> int:
        return self.store.new_var()


# ---------------------------------------------------------------- at-most-one

def amo_pairwise(sink: ClauseSink, lits: list[int]) -> None:
    for i in range(len(lits)):
        for j in range(i + 1, len(lits)):
            sink.add((-lits[i], -lits[j]))


def amo_commander(sink: ClauseSink, lits: list[int], group: int = 3) -> None:
    """Commander encoding: pairwise inside groups, one commander per group,
    recursing on the commanders."""
    if len(lits) <= group + 1:
        amo_pairwise(sink, lits)
        return
    commanders = []
    for k in range(0, len(lits), group):
        g = lits[k:k + group]
        if len(g) == 1:
            commanders.append(g[0])
            continue
        amo_pairwise(sink, g)
        cmd = sink.fresh()
        for x in g:
            sink.add((-x, cmd))
        sink.add((-cmd, *g))
        commanders.append(cmd)
    amo_commander(sink, commanders, group)


def encode_amo(sink: ClauseSink, lits: list[int], mode: str = "pairwise") -> None:
    if mode == "pairwise":
        amo_pairwise(sink, lits)
    elif mode == "commander":
        amo_commander(sink, lits)
    else:
        raise ValueError(f"unknown at-most-one encoding {mode!r}")


# ---------------------------------------------------------------- clause forms

def _values(a: IntVar, b: IntVar) -> range:
    return range(min(a.lo, b.lo) + 1, max(a.hi, b.hi) + 1)


def encode_ordered(sink, bits):
    for i in range(len(bits) - 1):
        sink.add((bits[i], -bits[i + 1]))


def encode_int_eq(sink, a, b):
    for v in _values(a, b):
        sink.add((-a.ge(v), b.ge(v)))
        sink.add((a.ge(v), -b.ge(v)))


def encode_int_leq(sink, a, b, extra=()):
    for v in _values(a, b):
        sink.add(extra + (-a.ge(v), b.ge(v)))


def encode_int_neq(sink, a, b, extra=()):
    for v in range(max(a.lo, b.lo), min(a.hi, b.hi) + 1):
        sink.add(extra + (-a.ge(v), a.ge(v + 1), -b.ge(v), b.ge(v + 1)))


def encode_int_leq_reif(sink, a, b, r):
    encode_int_leq(sink, a, b, (-r,))
    encode_int_leq(sink, b.shift(1), a, (r,))


def encode_int_eq_reif(sink, a, b, r):
    encode_int_leq(sink, a, b, (-r,))
    encode_int_leq(sink, b, a, (-r,))
    encode_int_neq(sink, a, b, (r,))


def encode_plus_totalizer(sink, a, b, s):
    base = a.lo + b.lo
    for i in range(a.size + 1):
        for j in range(b.size + 1):
            sink.add((-a.ge(a.lo + i), -b.ge(b.lo + j), s.ge(base + i + j)))
            sink.add((a.ge(a.lo + i + 1), b.ge(b.lo + j + 1), -s.ge(base + i + j + 1)))


def encode_comparator(sink, x1, x2, hi, lo):
    # hi = x1 or x2, lo = x1 and x2
    sink.add((-x1, hi))
    sink.add((-x2, hi))
    sink.add((-hi, x1, x2))
    sink.add((-lo, x1))
    sink.add((-lo, x2))
    sink.add((-x1, -x2, lo))


def encode_or_reif(sink, xs, r):
    sink.add((-r, *xs))
    for x in xs:
        sink.add((r, -x))


def _parity_clauses(sink, vs, parity):
    # forbid every assignment of vs whose xor differs from parity
    for bits in product((0, 1), repeat=len(vs)):
        if sum(bits) % 2 != parity:
            sink.add(tuple(v if bit == 0 else -v for v, bit in zip(vs, bits)))


def encode_xor(sink, xs, parity):
    lits = [sink.store.resolve(x) for x in xs]
    vs = []
    for x in lits:
        if x == TRUE:
            parity ^= 1
        elif x != FALSE:
            vs.append(x)
    while len(vs) > 3:
        a, b = vs.pop(0), vs.pop(0)
        t = sink.fresh()
        _parity_clauses(sink, [a, b, t], 0)
        vs.append(t)
    _parity_clauses(sink, vs, parity)


def encode_lex(sink, xs, ys):
    """xs <=lex ys: e_i means the first i positions are equal."""
    e = TRUE
    n = len(xs)
    for i, (x, y) in enumerate(zip(xs, ys)):
        sink.add((-e, -x, y))
        if i < n - 1:
            nxt = sink.fresh()
            sink.add((-e, -x, nxt))
            sink.add((-e, y, nxt))
            e = nxt


def encode_channel(sink, iv, rep):
    for v in rep.values:
        g, g1, d = iv.ge(v), iv.ge(v + 1), rep.d(v)
        sink.add((-d, g))
        sink.add((-d, -g1))
        sink.add((d, -g, g1))


def encode_card(sink, lits, k, eq, amo):
    rest = []
    for x in lits:
        r = sink.store.resolve(x)
        if r == TRUE:
            k -= 1
        elif r != FALSE:
            rest.append(r)
    n = len(rest)
    if k < 0 or (eq and k > n):
        sink.add(())
        return
    if eq and k == n:
        for x in rest:
            sink.add((x,))
        return
    if k == 0:
        for x in rest:
            sink.add((-x,))
        return
    if not eq and k >= n:
        return
    if k != 1:
        raise AssertionError(f"card with bound {k} reached the encoder")
    encode_amo(sink, rest, amo)
    if eq:
        sink.add(rest)


def encode_constraint(sink: ClauseSink, c: Constraint, amo: str = "pairwise") -> None:
    t, a = c.tag, c.args
    if t == "ordered":
        encode_ordered(sink, a[0])
    elif t == "bool_eq":
        sink.add((-a[0], a[1]))
        sink.add((a[0], -a[1]))
    elif t == "or":
        sink.add(a[0])
    elif t == "or_reif":
        encode_or_reif(sink, a[0], a[1])
    elif t == "xor":
        encode_xor(sink, a[0], c.opts["parity"])
    elif t == "lex":
        encode_lex(sink, a[0], a[1])
    elif t == "comparator":
        encode_comparator(sink, *a)
    elif t == "int_eq":
        encode_int_eq(sink, *a)
    elif t == "int_leq":
        encode_int_leq(sink, *a)
    elif t == "int_neq":
        encode_int_neq(sink, *a)
    elif t == "int_leq_reif":
        encode_int_leq_reif(sink, *a)
    elif t == "int_eq_reif":
        encode_int_eq_reif(sink, *a)
    elif t == "int_plus":
        encode_plus_totalizer(sink, *a)
    elif t == "channel":
        encode_channel(sink, *a)
    elif t == "card":
        encode_card(sink, a[0], c.opts["k"], c.opts["eq"], amo)
    else:
        raise AssertionError(f"no clause form for {t}")


def encode_model(model: Model, amo: str = "pairwise") -> tuple[Cnf, VarMap]:
    """Emit the CNF and VarMap for a fully decomposed model."""
    store = model.store
    sink = ClauseSink(store)
    if not model.unsat:
        for c in model.constraints.values():
            encode_constraint(sink, c, amo)
            if sink.unsat:
                break
    if model.unsat or sink.unsat:
        entries = [VarMapEntry(d.name, d.kind, *_bounds(d)) for d in model.decls.values()]
        return Cnf(0, [()]), VarMap(entries)

    # declarations first (in order, bit by bit), then the rest by internal id
    ids: dict[int, int] = {}
    for d in model.decls.values():
        for x in _decl_lits(d):
            v = abs(store.resolve(x))
            if v != 1 and v not in ids:
                ids[v] = len(ids) + 1
    rest = sorted({abs(x) for cl in sink.clauses for x in cl} - ids.keys())
    for v in rest:
        ids[v] = len(ids) + 1

    def sid(x: int) -> int:
        return ids[x] if x > 0 else -ids[-x]

    clauses = [tuple(sid(x) for x in cl) for cl in sink.clauses]
    entries = []
    for d in model.decls.values():
        toks = []
        for x in _decl_lits(d):
            r = store.resolve(x)
            toks.append(True if r == TRUE else False if r == FALSE else sid(r))
        entries.append(VarMapEntry(d.name, d.kind, *_bounds(d), tuple(toks)))
    return Cnf(len(ids), clauses), VarMap(entries)


def _decl_lits(d) -> tuple:
    return (d.rep,) if d.kind == "bool" else d.rep.bits


def _bounds(d) -> tuple[int, int]:
    return (0, 1) if d.kind == "bool" else (d.rep.lo, d.rep.hi)
