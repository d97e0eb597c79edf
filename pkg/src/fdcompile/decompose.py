"""Rewrite composite constraints into basic ones ahead of encoding."""
from __future__ import annotations

from dataclasses import dataclass

from .core import FALSE, Constraint, IntVar, Model, domain


@dataclass
class DecomposeOptions:
    plus: str = "hybrid"  # oddeven | totalizer | hybrid
    hybrid_threshold: int = 8


def _fresh_sum(model: Model, lo: int, hi: int) -> IntVar | None:
    if lo > hi:
        return None
    if lo == hi:
        return IntVar.const(lo)
    return model.new_int(lo, hi)


def decompose_int_array_plus(c: Constraint, model: Model, opts: DecomposeOptions):
    """Divide and conquer into binary int_plus over fresh interval sums."""
    xs, s = c.args
    n = len(xs)
    if n == 0:
        return [Constraint("int_eq", (s, IntVar.const(0)), line=c.line)]
    if n == 1:
        return [Constraint("int_eq", (xs[0], s), line=c.line)]
    if n == 2:
        return [Constraint("int_plus", (xs[0], xs[1], s), line=c.line)]
    out: list[Constraint] = []
    lo_all = sum(x.lo for x in xs)
    hi_all = sum(x.hi for x in xs)
    halves = (xs[: n // 2], xs[n // 2:])
    parts = []
    for half in halves:
        if len(half) == 1:
            parts.append(half[0])
            continue
        lo = sum(x.lo for x in half)
        hi = sum(x.hi for x in half)
        # the other half contributes between (lo_all - lo) and (hi_all - hi)
        sub = _fresh_sum(model, max(lo, s.lo - (hi_all - hi)), min(hi, s.hi - (lo_all - lo)))
        if sub is None:
            return [Constraint("or", ((),), line=c.line)]
        parts.append(sub)
        out.append(Constraint("int_array_plus", (tuple(half), sub), line=c.line))
    out.append(Constraint("int_plus", (parts[0], parts[1], s), line=c.line))
    return out


def comparator_merge(model: Model, xs: list[int], ys: list[int], out: list[Constraint]) -> list[int]:
    """Batcher odd-even merge of two sorted (non-increasing) bit sequences."""
    if not xs:
        return list(ys)
    if not ys:
        return list(xs)
    if len(xs) == 1 and len(ys) == 1:
        hi, lo = model.store.new_var(), model.store.new_var()
        out.append(Constraint("comparator", (xs[0], ys[0], hi, lo)))
        return [hi, lo]
    v = comparator_merge(model, xs[0::2], ys[0::2], out)
    w = comparator_merge(model, xs[1::2], ys[1::2], out)
    merged = [v[0]]
    i = 1
    while i < len(v) and i - 1 < len(w):
        hi, lo = model.store.new_var(), model.store.new_var()
        out.append(Constraint("comparator", (v[i], w[i - 1], hi, lo)))
        merged += [hi, lo]
        i += 1
    merged += v[i:] + w[i - 1:]
    return merged


def decompose_int_plus(c: Constraint, model: Model, opts: DecomposeOptions):
    if "mode" in c.opts:
        return None
    a, b, s = c.args
    mode = opts.plus
    if mode == "hybrid":
        mode = "totalizer" if max(a.size, b.size) <= opts.hybrid_threshold else "oddeven"
    if mode == "totalizer":
        return [Constraint("int_plus", c.args, {"mode": "totalizer"}, line=c.line)]
    out: list[Constraint] = []
    merged = comparator_merge(model, list(a.bits), list(b.bits), out)
    out.append(Constraint("int_eq", (s, IntVar(a.lo + b.lo, tuple(merged))), line=c.line))
    return out


def decompose_card(c: Constraint, model: Model, opts: DecomposeOptions):
    """Cardinality with bound >= 2 becomes a sum network of 1-bit integers."""
    lits = c.args[0]
    k, eq = c.opts["k"], c.opts["eq"]
    if k <= 1 or k >= len(lits):
        return None
    units = tuple(IntVar(0, (x,)) for x in lits)
    total = IntVar.const(k) if eq else model.new_int(0, k, c.line)
    return [Constraint("int_array_plus", (units, total), line=c.line)]


def decompose_alldiff(c: Constraint, model: Model, opts: DecomposeOptions):
    """One at-most-one per value column; exactly-one on the values a
    permutation must cover."""
    members = c.args[0]
    starred = c.opts.get("starred", False)
    store = model.store
    values = sorted({v for _, rep in members for v in rep.values})
    live = {v for iv, rep in members for v in domain(iv, store) if store.resolve(rep.d(v)) != FALSE}
    out = []
    for v in values:
        col = tuple(rep.d(v) for _, rep in members if v in rep.values)
        out.append(Constraint("card", (col,), {"k": 1, "eq": starred and v in live}, line=c.line))
    return out


def decompose_table(c: Constraint, model: Model, opts: DecomposeOptions):
    """times/div/mod as support clauses: (A=a and B=b) -> C = f(a, b)."""
    a, b, s = c.args
    f = {
        "int_times": lambda x, y: x * y,
        "int_div": lambda x, y: None if y == 0 else x // y,
        "int_mod": lambda x, y: None if y == 0 else x % y,
    }[c.tag]
    store = model.store
    out = []
    for x in domain(a, store):
        for y in domain(b, store):
            # literals that are true exactly when A = x and B = y
            ctx = (-a.ge(x), a.ge(x + 1), -b.ge(y), b.ge(y + 1))
            z = f(x, y)
            if z is None or z < s.lo or z > s.hi:
                out.append(Constraint("or", (ctx,), line=c.line))
                continue
            out.append(Constraint("or", (ctx + (s.ge(z),),), line=c.line))
            out.append(Constraint("or", (ctx + (-s.ge(z + 1),),), line=c.line))
    return out


def decompose_max_min(c: Constraint, model: Model, opts: DecomposeOptions):
    """max: S >= v iff some X >= v; min: S >= v iff every X >= v."""
    xs, s = c.args
    if not xs:
        return [Constraint("or", ((),), line=c.line)]
    is_max = c.tag == "int_array_max"
    lo = (max if is_max else min)(x.lo for x in xs)
    hi = (max if is_max else min)(x.hi for x in xs)
    out = [Constraint("int_leq", (IntVar.const(lo), s), line=c.line),
           Constraint("int_leq", (s, IntVar.const(hi)), line=c.line)]
    for v in range(lo + 1, hi + 1):
        col = tuple(x.ge(v) for x in xs)
        if is_max:
            out.append(Constraint("or_reif", (col, s.ge(v)), line=c.line))
        else:
            out.append(Constraint("or_reif", (tuple(-y for y in col), -s.ge(v)), line=c.line))
    return out


DECOMPOSERS = {
    "int_array_plus": decompose_int_array_plus,
    "int_plus": decompose_int_plus,
    "card": decompose_card,
    "alldiff": decompose_alldiff,
    "int_times": decompose_table,
    "int_div": decompose_table,
    "int_mod": decompose_table,
    "int_array_max": decompose_max_min,
    "int_array_min": decompose_max_min,
}


def decompose_once(model: Model, opts: DecomposeOptions) -> list[Constraint]:
    """Decompose every composite constraint one level; returns the new ones."""
    added: list[Constraint] = []
    for cid, c in list(model.constraints.items()):
        fn = DECOMPOSERS.get(c.tag)
        if fn is None:
            continue
        out = fn(c, model, opts)
        if out is None:
            continue
        model.remove(cid)
        for nc in out:
            model.add(nc)
            added.append(nc)
    return added
