import random
from collections import deque

import pytest

from fdcompile import simplify as S
from fdcompile.bitblast import blast_direct, build_model
from fdcompile.compiler import CompileOptions
from fdcompile.core import FALSE, TRUE, Constraint, IntVar, Model, current_bounds, domain
from fdcompile.decompose import decompose_once
from fdcompile.encode import encode_model
from fdcompile.generators import SMALL_GRAPH_EDGES, gen_dna, gen_qcp, gen_random_model, gen_vmtl
from fdcompile.parser import parse_model
from fdcompile.simplify import RULES, Engine, measure, simplify_fixpoint
from fdcompile.solver import enumerate_models


def _run(text):
    m = build_model(parse_model(text))
    simplify_fixpoint(m)
    return m


def _bits(m, name):
    return [m.store.resolve(b) for b in m.decls[name].rep.bits]


# ---------------------------------------------------------------- worked examples

def test_plus14_is_eliminated():
    m = _run("new_int(A, 1, 8)\nnew_int(B, 1, 8)\nint_plus(A, B, 14)\n")
    a, b = m.decls["A"].rep, m.decls["B"].rep
    assert [t.tag for t in m.live()] == ["ordered", "ordered"]
    # A >= 2 .. A >= 6 hold; B7 = -A8 and B8 = -A7
    assert _bits(m, "A")[:5] == [TRUE] * 5
    assert m.store.resolve(b.ge(7)) == -m.store.resolve(a.ge(8))
    assert m.store.resolve(b.ge(8)) == -m.store.resolve(a.ge(7))
    assert domain(a, m.store) == [6, 7, 8]


def test_reversal_trick_for_constant_sum():
    m = _run("new_int(A, 0, 5)\nnew_int(B, 0, 5)\nint_plus(A, B, 5)\n")
    a = _bits(m, "A")
    assert _bits(m, "B") == [-x for x in reversed(a)]
    assert all(c.tag == "ordered" for c in m.live())


def test_empty_model():
    m = Model()
    simplify_fixpoint(m)
    assert m.live() == [] and not m.unsat


def test_plus_bounds_example():
    m = Model()
    a, b = m.new_int(1, 8), m.new_int(1, 8)
    out = S.rule_plus_bounds(Constraint("int_plus", (a, b, IntVar.const(14))), m)
    assert out is not None
    assert current_bounds(a, m.store) == (6, 8)
    assert current_bounds(b, m.store) == (6, 8)


def test_plus_strip_example():
    m = Model()
    a, b = m.new_int(1, 8), m.new_int(1, 8)
    c = Constraint("int_plus", (a, b, IntVar.const(14)))
    S.rule_plus_bounds(c, m)
    (n,) = S.rule_plus_strip(c, m)
    x, y, s = n.args
    # ([A7, A8], [B7, B8], 14): the leading ones live on in the offsets
    assert (x.lo, [m.store.resolve(t) for t in x.bits]) == (6, list(a.bits[5:]))
    assert (y.lo, [m.store.resolve(t) for t in y.bits]) == (6, list(b.bits[5:]))
    assert s.is_const() and s.lo == 14


def test_plus_terminal_constant_sum():
    m = Model()
    a7, a8, b7, b8 = m.store.new_vars(4)
    # the sum written as the 4-bit vector [1, 1, 0, 0]
    c = Constraint("int_plus", (IntVar(0, (a7, a8)), IntVar(0, (b7, b8)), IntVar(0, (TRUE, TRUE, FALSE, FALSE))))
    assert S.rule_int_plus(c, m) == []
    assert m.store.resolve(b7) == -a8 and m.store.resolve(b8) == -a7


def test_plus_terminal_on_a_constant():
    m = Model()
    a = m.new_int(0, 2)
    b = m.new_int(0, 2)
    assert S.rule_plus_terminal(Constraint("int_plus", (a, b, IntVar.const(2))), m) == []
    assert [m.store.resolve(x) for x in b.bits] == [-a.bits[1], -a.bits[0]]


def test_plus_terminal_empty_addend():
    m = Model()
    a, c = m.store.new_vars(2)
    assert S.rule_plus_terminal(Constraint("int_plus", (IntVar(0, (a,)), IntVar(0, ()), IntVar(0, (c,)))), m) == []
    assert m.store.resolve(c) == m.store.resolve(a)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_plus_terminal_matches_enumeration(n):
    """Substituted vectors are exactly the order-consistent solutions of A+B=n."""
    m = Model()
    a, b = m.new_int(0, n), m.new_int(0, n)
    S.rule_plus_terminal(Constraint("int_plus", (a, b, IntVar.const(n))), m)
    free = sorted({abs(m.store.resolve(x)) for x in a.bits + b.bits} - {1})
    from itertools import product
    got = set()
    for vals in product((False, True), repeat=len(free)):
        env = dict(zip(free, vals))

        def lit(x):
            r = m.store.resolve(x)
            return r == TRUE if abs(r) == 1 else env[abs(r)] == (r > 0)
        ab, bb = [lit(x) for x in a.bits], [lit(x) for x in b.bits]
        if ab == sorted(ab, reverse=True) and bb == sorted(bb, reverse=True):
            got.add((sum(ab), sum(bb)))
    assert got == {(i, n - i) for i in range(n + 1)}


def test_neq_const_example():
    m = Model()
    x = m.new_int(0, 4)
    out = S.rule_neq_const(Constraint("int_neq", (x, IntVar(0, (TRUE, TRUE, FALSE, FALSE)))), m)
    assert out == []
    assert m.store.resolve(x.bits[1]) == m.store.resolve(x.bits[2])
    assert 2 not in domain(x, m.store)


def test_neq_const_outside_domain_is_removed():
    m = Model()
    x = m.new_int(0, 3)
    v = m.store.version
    assert S.rule_neq_const(Constraint("int_neq", (x, IntVar.const(9))), m) == []
    assert m.store.version == v


def test_neq_shared_template():
    m = Model()
    p, x1, x2, q = m.store.new_vars(4)
    a = IntVar(0, (p, x1, x2, q))
    b = IntVar(0, (p, -x2, -x1, q))
    S.rule_neq_shared(Constraint("int_neq", (a, b)), m)
    assert m.store.resolve(x1) == m.store.resolve(x2)


def test_neq_shared_needs_a_complementary_pair():
    m = Model()
    a = m.new_int(0, 3)
    b = m.new_int(0, 3)
    v = m.store.version
    assert S.rule_neq_shared(Constraint("int_neq", (a, b)), m) is None
    assert m.store.version == v


def test_neq_leading_ones_stripped():
    m = Model()
    x3, x4, y1, y2, y3, y4 = m.store.new_vars(6)
    c = Constraint("int_neq", (IntVar(0, (TRUE, TRUE, x3, x4)), IntVar(0, (y1, y2, y3, y4))))
    (n,) = S.rule_neq_partial(c, m)
    a, b = n.args
    # [1, X3, X4] against [Y2, Y3, Y4]; the leading one sits in the offset
    assert (a.lo, a.bits) == (1, (x3, x4))
    assert (b.lo, b.bits) == (0, (y2, y3, y4))


def test_neq_trailing_zeros_stripped():
    m = Model()
    x1, x2, y1, y2, y3, y4 = m.store.new_vars(6)
    c = Constraint("int_neq", (IntVar(0, (x1, x2, FALSE, FALSE)), IntVar(0, (y1, y2, y3, y4))))
    (n,) = S.rule_neq_partial(c, m)
    a, b = n.args
    assert (a.lo, a.bits) == (0, (x1, x2))
    assert (b.lo, b.bits) == (0, (y1, y2, y3))


def test_neq_identical_sides_is_unsat():
    m = Model()
    x = m.new_int(0, 3)
    S.rule_int_neq(Constraint("int_neq", (x, x)), m)
    assert m.unsat


def test_neq_disjoint_domains_removed():
    m = Model()
    x, y = m.new_int(0, 2), m.new_int(5, 7)
    assert S.rule_int_neq(Constraint("int_neq", (x, y)), m) == []


def test_int_eq_unifies_and_removes():
    m = _run("new_int(A, 0, 3)\nnew_int(B, 0, 3)\nint_eq(A, B)\n")
    assert _bits(m, "A") == _bits(m, "B")
    assert all(c.tag == "ordered" for c in m.live())


def test_int_lt_self_is_unsat():
    assert _run("new_int(I, 0, 3)\nint_lt(I, I)\n").unsat


def test_leq_bound_tightening():
    m = _run("new_int(A, 0, 6)\nnew_int(B, 1, 4)\nint_leq(A, B)\nint_geq(A, 3)\n")
    assert current_bounds(m.decls["A"].rep, m.store) == (3, 4)
    assert current_bounds(m.decls["B"].rep, m.store) == (3, 4)


def test_card_displays():
    m = Model()
    x1, x2, x4 = m.store.new_vars(3)
    (n,) = S.rule_card(Constraint("card", ((x1, x2, TRUE, x4),), {"k": 3, "eq": False}), m)
    assert n.args == ((x1, x2, x4),) and n.opts == {"k": 2, "eq": False}
    # x1 and -x1 contribute exactly one: [x2, x4] <= 2, which always holds
    assert S.rule_card(Constraint("card", ((x1, x2, -x1, x4),), {"k": 3, "eq": False}), m) == []
    (n,) = S.rule_card(Constraint("card", ((x1, x2, -x1, x4),), {"k": 2, "eq": False}), m)
    assert n.args == ((x2, x4),) and n.opts == {"k": 1, "eq": False}
    assert S.rule_card(Constraint("card", ((),), {"k": 0, "eq": True}), m) == []


def test_card_bound_zero_forces_false():
    m = Model()
    xs = m.store.new_vars(3)
    assert S.rule_card(Constraint("card", (tuple(xs),), {"k": 0, "eq": False}), m) == []
    assert all(m.store.resolve(x) == FALSE for x in xs)


def test_card_negative_bound_is_unsat():
    m = Model()
    x = m.store.new_var()
    S.rule_card(Constraint("card", ((x, TRUE),), {"k": 0, "eq": False}), m)
    assert m.unsat


@pytest.mark.parametrize("text, expect", [
    ("new_bool(x)\nnew_bool(y)\nbool_array_or([x, 1, y])\n", "removed"),
    ("new_bool(x)\nbool_array_xor([x, 1])\n", "x false"),
    ("new_bool(x)\nnew_bool(r)\nbool_and_reif(x, x, r)\n", "r is x"),
])
def test_bool_partial_evaluation(text, expect):
    m = _run(text)
    x = m.store.resolve(m.decls["x"].rep)
    assert m.live() == []
    if expect == "x false":
        assert x == FALSE
    if expect == "r is x":
        assert m.store.resolve(m.decls["r"].rep) == x


# ---------------------------------------------------------------- allDiff

def _alldiff(m, ivs):
    members = tuple((iv, blast_direct(m, iv)) for iv in ivs)
    return Constraint("alldiff", (members,), {"starred": False})


def test_detect_permutation():
    m = Model()
    c = _alldiff(m, [m.new_int(1, 8) for _ in range(8)])
    (n,) = S.detect_permutation(c, m)
    assert n.opts["starred"]
    m = Model()
    c = _alldiff(m, [m.new_int(0, 9) for _ in range(3)])
    assert S.detect_permutation(c, m) is None
    m = Model()
    c = _alldiff(m, [m.new_int(0, 1) for _ in range(3)])
    S.detect_permutation(c, m)
    assert m.unsat


def test_hall_pair_example():
    text = "".join(f"new_int(X{i}, 0, 7)\n" for i in range(1, 6))
    text += "int_leq(X1, 1)\nint_leq(X2, 1)\nallDiff([X1, X2, X3, X4, X5])\n"
    m = _run(text)
    x1, x2 = m.decls["X1"].rep, m.decls["X2"].rep
    assert m.store.resolve(x1.ge(1)) == -m.store.resolve(x2.ge(1))
    for i in (3, 4, 5):
        assert domain(m.decls[f"X{i}"].rep, m.store) == [2, 3, 4, 5, 6, 7]
    left = [c for c in m.live() if c.tag == "alldiff"]
    assert len(left) == 1 and len(left[0].args[0]) == 3


def test_permutation_pair_example():
    text = "".join(f"new_int(X{i}, 0, 4)\n" for i in range(1, 6))
    text += "".join(f"int_geq(X{i}, 2)\n" for i in (3, 4, 5)) + "allDiff([X1, X2, X3, X4, X5])\n"
    m = _run(text)
    for i in (1, 2):
        iv = m.decls[f"X{i}"].rep
        assert [m.store.resolve(b) for b in iv.bits[1:]] == [FALSE] * 3
    assert m.store.resolve(m.decls["X1"].rep.ge(1)) == -m.store.resolve(m.decls["X2"].rep.ge(1))
    (ad,) = [c for c in m.live() if c.tag == "alldiff"]
    assert ad.opts["starred"]


def test_perm_rule_needs_a_starred_constraint():
    m = Model()
    ivs = [m.new_int(0, 4) for _ in range(5)]
    c = _alldiff(m, ivs)
    v = m.store.version
    assert S.rule_alldiff_perm(c, m) is None
    assert m.store.version == v


def test_vmtl_small_graph_trace():
    m = _run(gen_vmtl(4, 14, SMALL_GRAPH_EDGES))
    st = m.store
    v4, e4 = m.decls["V4"].rep, m.decls["E4"].rep
    assert _bits(m, "V4")[:5] == [TRUE] * 5
    assert st.resolve(v4.ge(7)) == st.resolve(v4.ge(8))
    assert _bits(m, "E4") == [TRUE] * 5 + [-st.resolve(v4.ge(7))] * 2
    assert domain(v4, st) == [6, 8] and domain(e4, st) == [6, 8]
    (ad,) = [c for c in m.live() if c.tag == "alldiff"]
    assert ad.opts["starred"] and len(ad.args[0]) == 6
    for name in ("V1", "V2", "V3", "E1", "E2", "E3"):
        dom = domain(m.decls[name].rep, st)
        assert 6 not in dom and 8 not in dom


# ---------------------------------------------------------------- engine properties

def _progress_checked(failures):
    def wrap(tag, fn):
        def run(c, model):
            before = measure(model)
            out = fn(c, model)
            if out is None or model.store.inconsistent:
                return out
            cid = next(k for k, d in model.constraints.items() if d is c)
            saved = dict(model.constraints)
            model.remove(cid)
            model.extend(out)
            after = measure(model)
            model.constraints.clear()
            model.constraints.update(saved)
            if not after < before:
                failures.append((tag, c, out, before, after))
            return out
        return run
    return {t: wrap(t, f) for t, f in RULES.items()}


def _corpus(seed, n):
    rng = random.Random(seed)
    texts = [gen_random_model(rng) for _ in range(n)]
    return texts + [gen_vmtl(4, 14, SMALL_GRAPH_EDGES), gen_vmtl(5, 40), gen_dna("t", 4)] + \
        [gen_qcp(5, 12, s).to_model() for s in range(5)]


def test_every_rule_application_decreases_the_measure():
    failures = []
    rules = _progress_checked(failures)
    for text in _corpus(5, 300):
        Engine(build_model(parse_model(text)), rules).run()
    assert failures == []


def test_rules_returning_none_leave_the_store_alone():
    changed = []
    for text in _corpus(6, 200):
        m = build_model(parse_model(text))
        for c in m.live():
            v = m.store.version
            rule = RULES.get(c.tag)
            if rule is not None and rule(c, m) is None and m.store.version != v:
                changed.append(c)
    assert changed == []


def test_fixpoint_is_reached():
    for text in _corpus(7, 100):
        m = build_model(parse_model(text))
        simplify_fixpoint(m)
        if m.unsat:
            continue
        for c in list(m.live()):
            v = m.store.version
            rule = RULES.get(c.tag)
            assert rule is None or rule(c, m) is None, c
            assert m.store.version == v


class _ShuffledEngine(Engine):
    """Same rules, random scheduling."""

    def __init__(self, model, rng):
        super().__init__(model)
        self.rng = rng
        items = list(model.constraints.items())
        rng.shuffle(items)
        model.constraints = dict(items)

    def _push(self, cid):
        if cid not in self.queued:
            self.queued.add(cid)
            if self.rng.random() < 0.5:
                self.queue.appendleft(cid)
            else:
                self.queue.append(cid)
            if self.rng.random() < 0.3:
                self.queue = deque(self.rng.sample(list(self.queue), len(self.queue)))


def _solutions(text, engine_factory):
    m = build_model(parse_model(text))
    dopts = CompileOptions().decompose_options()
    while not m.unsat:
        engine_factory(m).run()
        if m.unsat or not decompose_once(m, dopts):
            break
    cnf, vm = encode_model(m)
    return {tuple(sorted(b.items())) for b in enumerate_models(cnf, vm)}


def test_confluence_at_the_observable_level():
    rng = random.Random(11)
    gen = random.Random(8)
    for text in [gen_random_model(gen) for _ in range(60)] + [gen_vmtl(4, 14, SMALL_GRAPH_EDGES)]:
        base = _solutions(text, Engine)
        for k in range(2):
            assert _solutions(text, lambda m: _ShuffledEngine(m, random.Random(rng.random()))) == base, text
