import random

from hypothesis import given, settings
from hypothesis import strategies as st

from fdcompile.core import (FALSE, TRUE, IntVar, LiteralStore, Substitution, current_bounds, domain,
                            negate, tighten)


def test_negate():
    assert negate(5) == -5
    assert negate(TRUE) == FALSE
    assert negate(negate(-5)) == -5


def test_union_with_constant():
    s = LiteralStore()
    x = s.new_var()
    assert s.resolve(x) == x
    s.union(x, TRUE)
    assert s.resolve(x) == TRUE
    assert s.value(-x) is False


def test_polarity_chaining():
    s = LiteralStore()
    x, y = s.new_vars(2)
    s.union(x, -y)
    s.union(y, TRUE)
    assert s.resolve(x) == FALSE


def test_contradiction_sets_flag():
    s = LiteralStore()
    x = s.new_var()
    s.union(x, -x)
    assert s.inconsistent
    t = LiteralStore()
    t.union(TRUE, FALSE)
    assert t.inconsistent


def test_union_x_y_then_negated_z():
    s = LiteralStore()
    x, y, z = s.new_vars(3)
    s.union(x, y)
    s.union(y, -z)
    assert s.resolve(x) == -s.resolve(z)
    assert s.resolve(-x) == s.resolve(z)


def _naive_classes(n, eqs):
    """Parity-labelled components by graph search over the equations."""
    adj = {v: [] for v in range(1, n + 1)}
    for a, b in eqs:
        p = (a > 0) == (b > 0)
        adj[abs(a)].append((abs(b), p))
        adj[abs(b)].append((abs(a), p))
    label = {}
    for root in range(1, n + 1):
        if root in label:
            continue
        label[root] = (root, True)
        todo = [root]
        while todo:
            v = todo.pop()
            _, pv = label[v]
            for w, p in adj[v]:
                if w not in label:
                    label[w] = (root, pv == p)
                    todo.append(w)
    return label


def test_union_chain_of_100_matches_naive_substitution():
    rng = random.Random(3)
    s = LiteralStore()
    vs = s.new_vars(100)
    eqs = []
    for i in range(99):
        a = vs[i] * rng.choice((1, -1))
        b = vs[i + 1] * rng.choice((1, -1))
        s.union(a, b)
        eqs.append((a, b))
    assert not s.inconsistent
    label = _naive_classes(s.num_vars, eqs)
    for v in vs:
        for w in vs:
            _, pv = label[v]
            _, pw = label[w]
            assert s.resolve(v) == (1 if pv == pw else -1) * s.resolve(w)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(-12, 12).filter(bool), st.integers(-12, 12).filter(bool)), max_size=30))
def test_store_properties(pairs):
    s = LiteralStore()
    s.new_vars(11)
    for a, b in pairs:
        s.union(a, b)
    for v in range(1, 13):
        r = s.resolve(v)
        assert s.resolve(r) == r
        if not s.inconsistent:
            assert s.resolve(-v) == -r
    if not s.inconsistent:
        for a, b in pairs:
            assert s.resolve(a) == s.resolve(b)
        # polarity soundness: against the naive oracle no class holds v and -v
        label = _naive_classes(12, pairs)
        for v in range(1, 13):
            root, p = label[v]
            assert s.resolve(v) == (1 if p else -1) * s.resolve(root)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(-8, 8).filter(bool), st.integers(-8, 8).filter(bool)), max_size=12))
def test_substitution_is_idempotent(pairs):
    s1, s2 = LiteralStore(), LiteralStore()
    s1.new_vars(7)
    s2.new_vars(7)
    sub = Substitution(list(pairs))
    sub.apply(s1)
    sub.apply(s2)
    sub.apply(s2)
    assert s1.inconsistent == s2.inconsistent
    assert [s1.resolve(v) for v in range(1, 9)] == [s2.resolve(v) for v in range(1, 9)]


def test_bounds_three_four_five():
    s = LiteralStore()
    x = IntVar(0, tuple(s.new_vars(9)))
    s.union(x.ge(3), TRUE)
    s.union(x.ge(6), FALSE)
    t = tighten(x, s)
    assert current_bounds(x, s) == (3, 5)
    assert domain(x, s) == [3, 4, 5]
    assert (t.lo, t.hi) == (3, 5)


def test_constant_rep_bounds():
    s = LiteralStore()
    assert current_bounds(IntVar.const(7), s) == (7, 7)
    assert domain(IntVar.const(7), s) == [7]


def test_equated_neighbours_exclude_values():
    s = LiteralStore()
    x = IntVar(0, tuple(s.new_vars(9)))
    for v in (2, 5, 7):
        s.union(x.ge(v), x.ge(v + 1))
    assert current_bounds(x, s) == (0, 9)
    assert domain(x, s) == [0, 1, 3, 4, 6, 8, 9]


def test_intvar_views():
    s = LiteralStore()
    x = IntVar(-2, tuple(s.new_vars(4)))
    assert (x.lo, x.hi, x.size) == (-2, 2, 4)
    assert x.ge(-2) == TRUE and x.ge(3) == FALSE
    n = x.negated()
    assert (n.lo, n.hi) == (-2, 2)
    # -X >= v  iff  X <= -v  iff  not (X >= -v + 1)
    for v in range(-1, 3):
        assert n.ge(v) == -x.ge(-v + 1)
    assert x.shift(5).lo == 3
    assert IntVar.const(4).is_const


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 7), st.lists(st.tuples(st.integers(0, 6), st.sampled_from([TRUE, FALSE])), max_size=3),
       st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), max_size=3))
def test_tighten_never_widens_and_keeps_values(width, fixes, eqs):
    s = LiteralStore()
    x = IntVar(0, tuple(s.new_vars(width)))
    before = set(domain(x, s))
    for i, c in fixes:
        if i < width:
            s.union(x.bits[i], c)
    for i, j in eqs:
        if i < width and j < width:
            s.union(x.bits[i], x.bits[j])
    if s.inconsistent:
        return
    t = tighten(x, s)
    if s.inconsistent:
        return
    lo, hi = current_bounds(x, s)
    assert 0 <= lo <= hi <= width
    assert set(domain(t, s)) <= before
    assert set(domain(t, s)) == set(domain(x, s))
