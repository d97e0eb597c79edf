"""Equi-propagation and partial evaluation.

Every rule has the shape ``rule(c, model) -> list[Constraint] | None``.  A rule
may unify literals in ``model.store`` (the substitution it generates) and
returns either ``None`` (nothing to rewrite) or the list of constraints that
replace ``c`` (empty when ``c`` has been fully absorbed).
"""
from __future__ import annotations

from collections import defaultdict, deque
from typing import Callable

from .core import (FALSE, TRUE, Constraint, DirectRep, IntVar, LiteralStore, Model,
                   domain, tighten)

Rule = Callable[[Constraint, Model], "list[Constraint] | None"]


def _fail(store: LiteralStore) -> list[Constraint]:
    store.union(TRUE, FALSE)
    return []


def force_ge(store: LiteralStore, iv: IntVar, v: int) -> None:
    """Assert ``iv >= v``; bounds below ``iv.lo`` are already implied."""
    if v > iv.lo:
        store.union(iv.ge(v), TRUE)


def force_le(store: LiteralStore, iv: IntVar, v: int) -> None:
    if v < iv.hi:
        store.union(iv.ge(v + 1), FALSE)


def unify_int(store: LiteralStore, a: IntVar, b: IntVar) -> None:
    for v in range(min(a.lo, b.lo) + 1, max(a.hi, b.hi) + 1):
        store.union(a.ge(v), b.ge(v))
    if a.lo > b.hi or b.lo > a.hi:
        store.union(TRUE, FALSE)


def fold_clause(store: LiteralStore, lits) -> tuple | None:
    """Resolve a clause; None if it is a tautology, else the remaining literals."""
    out: list[int] = []
    for x in lits:
        r = store.resolve(x)
        if r == TRUE or -r in out:
            return None
        if r != FALSE and r not in out:
            out.append(r)
    return tuple(out)


def _resolve_all(store: LiteralStore, xs) -> tuple:
    return tuple(store.resolve(x) for x in xs)


def _same_ints(xs, ys) -> bool:
    return len(xs) == len(ys) and all(a.lo == b.lo and a.bits == b.bits for a, b in zip(xs, ys))


# ---------------------------------------------------------------- Boolean

def rule_bool_eq(c: Constraint, model: Model):
    model.store.union(c.args[0], c.args[1])
    return []


def rule_or(c: Constraint, model: Model):
    store = model.store
    lits = fold_clause(store, c.args[0])
    if lits is None:
        return []
    if not lits:
        return _fail(store)
    if len(lits) == 1:
        store.union(lits[0], TRUE)
        return []
    if lits == tuple(c.args[0]):
        return None
    return [Constraint("or", (lits,), line=c.line)]


def rule_or_reif(c: Constraint, model: Model):
    store = model.store
    xs, r = c.args
    r = store.resolve(r)
    lits = fold_clause(store, xs)
    if lits is None:
        store.union(r, TRUE)
        return []
    if not lits:
        store.union(r, FALSE)
        return []
    if len(lits) == 1:
        store.union(r, lits[0])
        return []
    if r == TRUE:
        return [Constraint("or", (lits,), line=c.line)]
    if r == FALSE:
        for x in lits:
            store.union(x, FALSE)
        return []
    if -r in lits:
        # r <-> (-r or R) holds only with r true
        store.union(r, TRUE)
        return [Constraint("or", (tuple(x for x in lits if x != -r),), line=c.line)]
    if lits == tuple(xs) and r == c.args[1]:
        return None
    return [Constraint("or_reif", (lits, r), line=c.line)]


def rule_xor(c: Constraint, model: Model):
    store = model.store
    parity = c.opts["parity"]
    lits: dict[int, int] = {}
    for x in c.args[0]:
        r = store.resolve(x)
        if r == TRUE:
            parity ^= 1
        elif r == FALSE:
            continue
        elif abs(r) in lits:
            # x xor x = 0, x xor -x = 1
            if lits.pop(abs(r)) != r:
                parity ^= 1
        else:
            lits[abs(r)] = r
    vs = tuple(lits.values())
    if not vs:
        return _fail(store) if parity else []
    if len(vs) == 1:
        store.union(vs[0], TRUE if parity else FALSE)
        return []
    if len(vs) == 2:
        store.union(vs[0], -vs[1] if parity else vs[1])
        return []
    if vs == tuple(c.args[0]) and parity == c.opts["parity"]:
        return None
    return [Constraint("xor", (vs,), {"parity": parity}, line=c.line)]


def rule_lex(c: Constraint, model: Model):
    store = model.store
    xs = list(_resolve_all(store, c.args[0]))
    ys = list(_resolve_all(store, c.args[1]))
    while xs:
        x, y = xs[0], ys[0]
        if x == y:
            pass
        elif x == -y:
            # x <= -x forces x false, then the prefix is strictly smaller
            store.union(x, FALSE)
            return []
        elif x == TRUE:
            store.union(y, TRUE)
        elif y == FALSE:
            store.union(x, FALSE)
        elif x == FALSE and y == TRUE:
            return []
        else:
            break
        xs.pop(0)
        ys.pop(0)
        xs = [store.resolve(v) for v in xs]
        ys = [store.resolve(v) for v in ys]
    if not xs:
        return []
    new = (tuple(xs), tuple(ys))
    if new == (tuple(c.args[0]), tuple(c.args[1])):
        return None
    return [Constraint("lex", new, line=c.line)]


def rule_comparator(c: Constraint, model: Model):
    store = model.store
    a, b, hi, lo = _resolve_all(store, c.args)
    if a == TRUE or b == TRUE:
        store.union(hi, TRUE)
        store.union(lo, b if a == TRUE else a)
        return []
    if a == FALSE or b == FALSE:
        store.union(hi, b if a == FALSE else a)
        store.union(lo, FALSE)
        return []
    if a == b:
        store.union(hi, a)
        store.union(lo, a)
        return []
    if a == -b:
        store.union(hi, TRUE)
        store.union(lo, FALSE)
        return []
    if hi == FALSE:
        for x in (a, b, lo):
            store.union(x, FALSE)
        return []
    if lo == TRUE:
        for x in (a, b, hi):
            store.union(x, TRUE)
        return []
    if (a, b, hi, lo) == tuple(c.args):
        return None
    return [Constraint("comparator", (a, b, hi, lo), line=c.line)]


def rule_ordered(c: Constraint, model: Model):
    store = model.store
    seq = list(c.args[0])
    while True:
        seq = list(tighten(IntVar(0, tuple(seq)), store).bits)
        if store.inconsistent:
            return []
        runs: list[int] = []
        for x in seq:
            if not runs or runs[-1] != x:
                runs.append(x)
        seq = runs
        pos: dict[int, int] = {}
        acted = False
        for j, x in enumerate(seq):
            if x in pos:
                # x == ... == x squeezes everything in between
                for k in range(pos[x] + 1, j):
                    store.union(seq[k], x)
                acted = True
                break
            if -x in pos:
                # -x earlier than x: -x >= x forces x false
                store.union(x, FALSE)
                acted = True
                break
            pos[x] = j
        if not acted:
            break
    new = tuple(seq)
    if len(new) <= 1:
        return []
    if new == tuple(c.args[0]):
        return None
    return [Constraint("ordered", (new,), line=c.line)]


# ---------------------------------------------------------------- integer relations

def _leq_clauses(a: IntVar, b: IntVar):
    for v in range(min(a.lo, b.lo) + 1, max(a.hi, b.hi) + 1):
        yield (-a.ge(v), b.ge(v))


def _neq_columns(a: IntVar, b: IntVar) -> list[tuple[int, int]]:
    lo = min(a.lo, b.lo)
    hi = max(a.hi, b.hi)
    return [(a.ge(v), b.ge(v)) for v in range(lo + 1, hi + 1)]


def _neq_clauses(a: IntVar, b: IntVar):
    for v in range(max(a.lo, b.lo), min(a.hi, b.hi) + 1):
        yield (-a.ge(v), a.ge(v + 1), -b.ge(v), b.ge(v + 1))


def rule_int_eq(c: Constraint, model: Model):
    unify_int(model.store, *c.args)
    return []


def rule_int_leq(c: Constraint, model: Model):
    store = model.store
    a, b = c.args
    while True:
        v0 = store.version
        a, b = tighten(a, store), tighten(b, store)
        force_ge(store, b, a.lo)
        force_le(store, a, b.hi)
        if store.inconsistent:
            return []
        if store.version == v0:
            break
    if all(fold_clause(store, cl) is None for cl in _leq_clauses(a, b)):
        return []
    if (a, b) == tuple(c.args):
        return None
    return [Constraint("int_leq", (a, b), line=c.line)]


def _reduce_neq(store: LiteralStore, a: IntVar, b: IntVar):
    """Partial evaluation of A != B over aligned columns.

    Returns ``True`` when the constraint is entailed, ``False`` when it is
    violated (A and B are syntactically equal), otherwise the reduced column
    list (a subsequence of the original columns, so both sides stay ordered).
    """
    cols: list[tuple[int, int]] = []
    seen = set()
    for x, y in _neq_columns(a, b):
        x, y = store.resolve(x), store.resolve(y)
        if x == y:
            continue
        if x == -y:
            return True
        if (x, y) in seen or (-x, -y) in seen:
            continue
        seen.add((x, y))
        cols.append((x, y))
    if not cols:
        return False
    return cols


def rule_neq_const(c: Constraint, model: Model):
    """neq1: a constant side removes one value from the other."""
    store = model.store
    before = store.version
    a, b = tighten(c.args[0], store), tighten(c.args[1], store)
    if b.is_const():
        a, b = b, a
    if not a.is_const():
        return [c] if store.version != before else None
    k = a.lo
    store.union(b.ge(k), b.ge(k + 1))
    return []


def rule_neq_shared(c: Constraint, model: Model):
    """neq2: sides sharing complementary literals."""
    store = model.store
    cols = _reduce_neq(store, c.args[0], c.args[1])
    if not isinstance(cols, list):
        return None
    if len(cols) == 1:
        x, y = cols[0]
        store.union(x, -y)
        return []
    if len(cols) == 2:
        (x1, y1), (x2, y2) = cols
        if y1 == -x2 and y2 == -x1:
            store.union(x1, x2)
            return []
    return None


def rule_neq_partial(c: Constraint, model: Model):
    """neq3/neq4: drop replicated and constant columns."""
    store = model.store
    a, b = c.args
    cols = _reduce_neq(store, a, b)
    if cols is True:
        return []
    if cols is False:
        return _fail(store)
    # neq4: two leading ones (or two trailing zeros) on either side make the
    # outer column irrelevant; if the other side's bit there is 0 (1) that
    # side leaves the range of the first
    while len(cols) >= 2:
        if any(cols[0][k] == TRUE and cols[1][k] == TRUE for k in (0, 1)):
            cols.pop(0)
        elif any(cols[-1][k] == FALSE and cols[-2][k] == FALSE for k in (0, 1)):
            cols.pop()
        else:
            break
    if cols == [(store.resolve(x), store.resolve(y)) for x, y in _neq_columns(a, b)]:
        return None
    new = (tighten(IntVar(0, tuple(x for x, _ in cols)), store),
           tighten(IntVar(0, tuple(y for _, y in cols)), store))
    return [Constraint("int_neq", new, line=c.line)]


def rule_int_neq(c: Constraint, model: Model):
    for fn in (rule_neq_const, rule_neq_shared, rule_neq_partial):
        out = fn(c, model)
        if out is not None:
            return out
    return None


def _rule_reif(c: Constraint, model: Model, pos, neg, when_true, when_false):
    store = model.store
    r = store.resolve(c.args[2])
    if r == TRUE:
        return when_true()
    if r == FALSE:
        return when_false()
    pos_cls = [fold_clause(store, cl) for cl in pos]
    neg_cls = [fold_clause(store, cl) for cl in neg]
    if any(cl == () for cl in pos_cls) or all(cl is None for cl in neg_cls):
        store.union(r, FALSE)
        return when_false()
    if any(cl == () for cl in neg_cls) or all(cl is None for cl in pos_cls):
        store.union(r, TRUE)
        return when_true()
    if r == c.args[2]:
        return None
    return [Constraint(c.tag, (c.args[0], c.args[1], r), line=c.line)]


def rule_int_leq_reif(c: Constraint, model: Model):
    a, b = c.args[0], c.args[1]
    # not (a <= b)  <=>  b + 1 <= a
    return _rule_reif(
        c, model, _leq_clauses(a, b), _leq_clauses(b.shift(1), a),
        lambda: [Constraint("int_leq", (a, b), line=c.line)],
        lambda: [Constraint("int_leq", (b.shift(1), a), line=c.line)])


def rule_int_eq_reif(c: Constraint, model: Model):
    a, b = c.args[0], c.args[1]
    pos = list(_leq_clauses(a, b)) + list(_leq_clauses(b, a))
    return _rule_reif(
        c, model, pos, _neq_clauses(a, b),
        lambda: [Constraint("int_eq", (a, b), line=c.line)],
        lambda: [Constraint("int_neq", (a, b), line=c.line)])


# ---------------------------------------------------------------- addition

def _plus(c: Constraint, a: IntVar, b: IntVar, s: IntVar) -> Constraint:
    return Constraint("int_plus", (a, b, s), dict(c.opts), line=c.line)


def rule_plus_bounds(c: Constraint, model: Model):
    """plus1: interval propagation for A + B = C."""
    store = model.store
    a, b, s = c.args
    start = store.version
    while True:
        v0 = store.version
        a, b, s = tighten(a, store), tighten(b, store), tighten(s, store)
        force_ge(store, s, a.lo + b.lo)
        force_le(store, s, a.hi + b.hi)
        force_ge(store, a, s.lo - b.hi)
        force_le(store, a, s.hi - b.lo)
        force_ge(store, b, s.lo - a.hi)
        force_le(store, b, s.hi - a.lo)
        if store.inconsistent:
            return []
        if store.version == v0:
            break
    if store.version == start:
        return None
    return [_plus(c, a, b, s)]


def rule_plus_strip(c: Constraint, model: Model):
    """plus2: drop leading ones / trailing zeros (a shift of the bounds)."""
    store = model.store
    new = tuple(tighten(x, store) for x in c.args)
    if store.inconsistent:
        return []
    if _same_ints(new, c.args):
        return None
    return [_plus(c, *new)]


def rule_plus_terminal(c: Constraint, model: Model):
    """plus3a (a constant addend) and plus3b (a constant sum)."""
    store = model.store
    a, b, s = c.args
    if b.is_const():
        a, b = b, a
    if a.is_const():
        unify_int(store, s, b.shift(a.lo))
        return []
    if s.is_const():
        # A + B = k  <=>  B = k - A, i.e. B's bits are the reversed negation of A's
        unify_int(store, b, a.negated().shift(s.lo))
        return []
    return None


def rule_int_plus(c: Constraint, model: Model):
    cur, changed = c, False
    while True:
        for fn in (rule_plus_bounds, rule_plus_strip, rule_plus_terminal):
            out = fn(cur, model)
            if out is not None:
                break
        else:
            return [cur] if changed else None
        if len(out) != 1 or out[0].tag != "int_plus":
            return out
        cur, changed = out[0], True


def rule_int_array_plus(c: Constraint, model: Model):
    store = model.store
    xs, s = c.args
    start = store.version
    while True:
        v0 = store.version
        xs = [tighten(x, store) for x in xs]
        s = tighten(s, store)
        offset = sum(x.lo for x in xs if x.is_const())
        xs = [x for x in xs if not x.is_const()]
        s = s.shift(-offset)
        lo = sum(x.lo for x in xs)
        hi = sum(x.hi for x in xs)
        force_ge(store, s, lo)
        force_le(store, s, hi)
        for x in xs:
            force_ge(store, x, s.lo - (hi - x.hi))
            force_le(store, x, s.hi - (lo - x.lo))
        if store.inconsistent:
            return []
        if store.version == v0:
            break
    if not xs:
        unify_int(store, s, IntVar.const(0))
        return []
    if len(xs) == 1:
        return [Constraint("int_eq", (xs[0], s), line=c.line)]
    if len(xs) == 2:
        return [Constraint("int_plus", (xs[0], xs[1], s), line=c.line)]
    if store.version == start and _same_ints(xs, c.args[0]) and _same_ints((s,), (c.args[1],)):
        return None
    return [Constraint("int_array_plus", (tuple(xs), s), line=c.line)]


# ---------------------------------------------------------------- other arithmetic

def _ops():
    return {
        "int_times": lambda a, b: a * b,
        "int_div": lambda a, b: None if b == 0 else a // b,
        "int_mod": lambda a, b: None if b == 0 else a % b,
    }


def rule_int_arith(c: Constraint, model: Model):
    """Bounds propagation for times/div/mod by enumerating supports."""
    store = model.store
    f = _ops()[c.tag]
    a, b, s = c.args
    while True:
        v0 = store.version
        a, b, s = (tighten(x, store) for x in (a, b, s))
        if store.inconsistent:
            return []
        ds = set(domain(s, store))
        sup = [(x, y, f(x, y)) for x in domain(a, store) for y in domain(b, store)]
        sup = [t for t in sup if t[2] is not None and t[2] in ds]
        if not sup:
            return _fail(store)
        for iv, vals in ((a, [t[0] for t in sup]), (b, [t[1] for t in sup]), (s, [t[2] for t in sup])):
            force_ge(store, iv, min(vals))
            force_le(store, iv, max(vals))
        if store.version == v0:
            break
    if a.is_const() and b.is_const():
        unify_int(store, s, IntVar.const(f(a.lo, b.lo)))
        return []
    if b.is_const() and b.lo == 1 and c.tag in ("int_times", "int_div"):
        return [Constraint("int_eq", (a, s), line=c.line)]
    if a.is_const() and a.lo == 1 and c.tag == "int_times":
        return [Constraint("int_eq", (b, s), line=c.line)]
    if _same_ints((a, b, s), c.args):
        return None
    return [Constraint(c.tag, (a, b, s), line=c.line)]


# ---------------------------------------------------------------- cardinality

def rule_card(c: Constraint, model: Model):
    """Drop false literals, absorb true ones, cancel complementary pairs."""
    store = model.store
    k = c.opts["k"]
    eq = c.opts["eq"]
    lits: list[int] = []
    for x in c.args[0]:
        r = store.resolve(x)
        if r == FALSE:
            continue
        if r == TRUE:
            k -= 1
        elif -r in lits:
            # exactly one of r, -r is true
            lits.remove(-r)
            k -= 1
        else:
            lits.append(r)
    n = len(lits)
    if k < 0 or (eq and k > n):
        return _fail(store)
    if not eq and k >= n:
        return []
    if k == 0:
        for x in lits:
            store.union(x, FALSE)
        return []
    if eq and k == n:
        for x in lits:
            store.union(x, TRUE)
        return []
    if k == 1:
        dup = {x for x in lits if lits.count(x) > 1}
        if dup:
            for x in dup:
                store.union(x, FALSE)
            return [Constraint("card", (tuple(lits),), {"k": k, "eq": eq}, line=c.line)]
    if tuple(lits) == tuple(c.args[0]) and k == c.opts["k"]:
        return None
    return [Constraint("card", (tuple(lits),), {"k": k, "eq": eq}, line=c.line)]


# ---------------------------------------------------------------- direct encoding

def rule_channel(c: Constraint, model: Model):
    store = model.store
    iv, rep = c.args
    before = store.version
    done = True
    for v in rep.values:
        g = store.resolve(iv.ge(v))
        g1 = store.resolve(iv.ge(v + 1))
        d = store.resolve(rep.d(v))
        if d == TRUE:
            store.union(g, TRUE)
            store.union(g1, FALSE)
        elif d == FALSE:
            store.union(g, g1)
        elif g == g1 or g == FALSE or g1 == TRUE:
            store.union(d, FALSE)
        elif g == TRUE:
            store.union(d, -g1)
        elif g1 == FALSE or g == -g1:
            store.union(d, g)
        else:
            done = False
    if done:
        return []
    return [c] if store.version != before else None


def _members(c: Constraint, model: Model):
    store = model.store
    out = []
    for iv, rep in c.args[0]:
        dom = [v for v in domain(iv, store) if store.resolve(rep.d(v)) != FALSE]
        out.append((iv, rep, dom))
    return out


def _alldiff(c: Constraint, members, starred: bool) -> Constraint:
    return Constraint("alldiff", (tuple((iv, rep) for iv, rep, *_ in members),),
                      {"starred": starred}, line=c.line)


def rule_alldiff_basic(c: Constraint, model: Model):
    """Fixed members, empty domains and column partial evaluation."""
    store = model.store
    members = _members(c, model)
    if any(not dom for _, _, dom in members):
        return _fail(store)
    keys = [(iv.resolved(store).lo, iv.resolved(store).bits) for iv, _, _ in members]
    if len(set(keys)) < len(keys):
        return _fail(store)
    fixed = [m for m in members if len(m[2]) == 1]
    if fixed:
        vals = [m[2][0] for m in fixed]
        if len(set(vals)) < len(vals):
            return _fail(store)
        rest = [m for m in members if len(m[2]) != 1]
        for iv, rep, dom in fixed:
            store.union(rep.d(dom[0]), TRUE)
            for _, rep2, _ in rest:
                store.union(rep2.d(dom[0]), FALSE)
        if len(rest) <= 1:
            return []
        return [_alldiff(c, rest, c.opts["starred"])]
    # a column containing a true entry excludes that value everywhere else
    changed = False
    for v in sorted({v for _, _, dom in members for v in dom}):
        col = [store.resolve(rep.d(v)) for _, rep, dom in members]
        if TRUE in col:
            for x in col:
                if x != TRUE:
                    changed |= store.union(x, FALSE)
            continue
        live = [x for x in col if x != FALSE]
        for x in {x for x in live if live.count(x) > 1}:
            changed |= store.union(x, FALSE)
    return [c] if changed else None


def detect_permutation(c: Constraint, model: Model):
    members = _members(c, model)
    values = {v for _, _, dom in members for v in dom}
    if len(values) < len(members):
        return _fail(model.store)
    if len(values) == len(members) and not c.opts["starred"]:
        return [_alldiff(c, members, True)]
    return None


def rule_alldiff_hall2(c: Constraint, model: Model):
    """allDiff1: two members sharing the same two-value domain."""
    store = model.store
    members = _members(c, model)
    by_dom: dict[tuple, int] = {}
    for i, (_, _, dom) in enumerate(members):
        if len(dom) != 2:
            continue
        key = tuple(dom)
        if key not in by_dom:
            by_dom[key] = i
            continue
        j = by_dom[key]
        v1, v2 = key
        _, r1, _ = members[j]
        _, r2, _ = members[i]
        for k, (_, rk, _) in enumerate(members):
            if k not in (i, j):
                store.union(rk.d(v1), FALSE)
                store.union(rk.d(v2), FALSE)
        store.union(r1.d(v1), -r2.d(v1))
        store.union(r1.d(v2), -r2.d(v2))
        rest = [m for k, m in enumerate(members) if k not in (i, j)]
        if len(rest) <= 1:
            return []
        return [_alldiff(c, rest, False)]
    return None


def rule_alldiff_perm(c: Constraint, model: Model):
    """allDiff2 (permutation only): values that only two members can take."""
    if not c.opts["starred"]:
        return None
    store = model.store
    members = _members(c, model)
    holders: dict[int, list[int]] = defaultdict(list)
    for i, (_, _, dom) in enumerate(members):
        for v in dom:
            holders[v].append(i)
    changed = False
    for v, hs in holders.items():
        if len(hs) == 1:
            # every value of a permutation is taken by someone
            _, rep, _ = members[hs[0]]
            changed |= store.union(rep.d(v), TRUE)
    groups: dict[tuple, list[int]] = defaultdict(list)
    for v, hs in holders.items():
        if len(hs) == 2:
            groups[tuple(hs)].append(v)
    for hs, vals in groups.items():
        if len(vals) > 2:
            return _fail(store)
        if len(vals) == 2:
            for i in hs:
                _, rep, dom = members[i]
                for v in dom:
                    if v not in vals:
                        changed |= store.union(rep.d(v), FALSE)
    return [c] if changed else None


def rule_alldiff_pairs(c: Constraint, model: Model):
    """Pairwise neq propagation among small-domain members."""
    store = model.store
    before = store.version
    members = _members(c, model)
    small = [(tighten(iv, store), dom) for iv, _, dom in members if len(dom) <= 3]
    for i in range(len(small)):
        for j in range(i + 1, len(small)):
            cols = _reduce_neq(store, small[i][0].resolved(store), small[j][0].resolved(store))
            if cols is False:
                return _fail(store)
            if cols is True:
                continue
            if len(cols) == 1:
                store.union(cols[0][0], -cols[0][1])
            elif len(cols) == 2:
                (x1, y1), (x2, y2) = cols
                if y1 == -x2 and y2 == -x1:
                    store.union(x1, x2)
    return [c] if store.version != before else None


def rule_alldiff(c: Constraint, model: Model):
    members = c.args[0]
    if len(members) <= 1:
        return []
    for fn in (rule_alldiff_basic, detect_permutation, rule_alldiff_pairs,
               rule_alldiff_hall2, rule_alldiff_perm):
        out = fn(c, model)
        if out is not None:
            return out
        if model.store.inconsistent:
            return []
    return None


def _canon(obj, store: LiteralStore):
    if isinstance(obj, int):
        return store.resolve(obj)
    if isinstance(obj, IntVar):
        return ("I", obj.lo, tuple(store.resolve(x) for x in obj.bits))
    if isinstance(obj, DirectRep):
        return ("D", obj.base, tuple(store.resolve(x) for x in obj.dbits))
    return tuple(_canon(x, store) for x in obj)


def _guarded(rule: Rule) -> Rule:
    """A rewrite that only renames literals to their representatives is no
    rewrite at all; report it as ``None`` so every step makes progress."""

    def run(c: Constraint, model: Model):
        before = model.store.version
        out = rule(c, model)
        if out is not None and len(out) == 1 and model.store.version == before:
            n = out[0]
            if (n.tag == c.tag and n.opts == c.opts
                    and _canon(n.args, model.store) == _canon(c.args, model.store)):
                return None
        return out

    run.__name__ = rule.__name__
    run.__doc__ = rule.__doc__
    return run


RULES: dict[str, Rule] = {tag: _guarded(fn) for tag, fn in {
    "bool_eq": rule_bool_eq,
    "or": rule_or,
    "or_reif": rule_or_reif,
    "xor": rule_xor,
    "lex": rule_lex,
    "comparator": rule_comparator,
    "ordered": rule_ordered,
    "int_eq": rule_int_eq,
    "int_leq": rule_int_leq,
    "int_neq": rule_int_neq,
    "int_leq_reif": rule_int_leq_reif,
    "int_eq_reif": rule_int_eq_reif,
    "int_plus": rule_int_plus,
    "int_array_plus": rule_int_array_plus,
    "int_times": rule_int_arith,
    "int_div": rule_int_arith,
    "int_mod": rule_int_arith,
    "card": rule_card,
    "channel": rule_channel,
    "alldiff": rule_alldiff,
}.items()}

# composite forms outrank the forms they are rewritten into
_RANK = {"int_array_plus": 3, "int_plus": 2, "int_times": 2, "int_div": 2, "int_mod": 2, "alldiff": 2}


def measure(model: Model) -> tuple[int, int, int, int]:
    """Progress measure over the live constraints, compared lexicographically:
    unresolved literals, operand size (one per constraint, per integer
    operand and per non-constant literal occurrence), constant literal
    occurrences, and a rank that puts composite constraints above the
    simpler forms they rewrite into (a starred allDiff ranks below an
    unstarred one).
    """
    store = model.store
    unresolved = set()
    size = consts = rank = 0
    for c in model.constraints.values():
        size += 1 + _operands(c.args)
        r = _RANK.get(c.tag, 1)
        if c.tag == "alldiff" and c.opts.get("starred"):
            r = 1
        rank += r
        for x in c.literals():
            v = store.resolve(x)
            if v in (TRUE, FALSE):
                consts += 1
            else:
                size += 1
                unresolved.add(abs(v))
    return len(unresolved), size, consts, rank


def _operands(obj) -> int:
    if isinstance(obj, int):
        return 0
    if isinstance(obj, (IntVar, DirectRep)):
        return 1
    return sum(_operands(x) for x in obj)


class Engine:
    """Worklist driver: a constraint is re-run whenever one of its literals
    changes class."""

    def __init__(self, model: Model, rules: dict[str, Rule] | None = None):
        self.model = model
        self.rules = RULES if rules is None else rules
        self.occ: dict[int, set[int]] = defaultdict(set)
        self.queue: deque[int] = deque()
        self.queued: set[int] = set()
        self.steps = 0

    def _register(self, cid: int, c: Constraint) -> None:
        store = self.model.store
        for x in c.literals():
            v = abs(store.resolve(x))
            if v != 1:
                self.occ[v].add(cid)

    def _push(self, cid: int) -> None:
        if cid not in self.queued:
            self.queued.add(cid)
            self.queue.append(cid)

    def add(self, c: Constraint) -> int:
        cid = self.model.add(c)
        self._register(cid, c)
        self._push(cid)
        return cid

    def run(self) -> None:
        model, store = self.model, self.model.store
        for cid, c in list(model.constraints.items()):
            self._register(cid, c)
            self._push(cid)
        store.drain_touched()
        while self.queue and not store.inconsistent:
            cid = self.queue.popleft()
            self.queued.discard(cid)
            c = model.constraints.get(cid)
            if c is None:
                continue
            rule = self.rules.get(c.tag)
            if rule is None:
                continue
            out = rule(c, model)
            self.steps += 1
            for v in store.drain_touched():
                for d in self.occ.pop(v, ()):
                    self._push(d)
            if out is None:
                self._register(cid, c)
                continue
            model.remove(cid)
            for nc in out:
                self.add(nc)


def simplify_fixpoint(model: Model) -> Model:
    """Apply the rules until none fires (or the model is found UNSAT)."""
    Engine(model).run()
    return model
