"""Acceptance criteria, one marked test (or group) per criterion.

Run directly with ``python tests/test_acceptance.py`` for just the summary."""
import random
import shlex
import sys
import time
from itertools import product
from pathlib import Path

import pytest

from fdcompile.checker import check, solution_set
from fdcompile.cli import main
from fdcompile.compiler import CompileOptions, compile_text
from fdcompile.generators import (SMALL_GRAPH_EDGES, compose_words, dna_vectors, dna_words_ok, gen_dna, gen_qcp,
                                  gen_random_model, qcp_complete, vmtl_labels_ok)
from fdcompile.parser import parse_assignment, parse_model
from fdcompile.cli import declared_varmap
from fdcompile.solver import decode, enumerate_models, solve

from e2e import cnf_solution_set, text_solution_set
from soundness import CASES, run_case

ROOT = Path(__file__).resolve().parents[1]
DATA = Path(__file__).parent / "data"

PLUS14 = "A+B=14 is eliminated before encoding"
SMALL_GRAPH = "VMTL four-vertex graph regression"
DNA = "DNA word verdicts"
FUZZ = "end-to-end oracle fuzz (500 models)"
RULES = "per-rule soundness suite"
QCP = "compile-time UNSAT and QCP oracle agreement"
ENC = "encoding-choice equivalence"

# our own counts for the four-vertex model, default and without simplification
SMALL_GRAPH_GOLDEN = {"default": (48, 294), "no-simplify": (224, 1311)}


# ---------------------------------------------------------------- A+B=14

@pytest.mark.acceptance(PLUS14)
def test_plus14_elimination():
    t0 = time.perf_counter()
    res = compile_text((DATA / "plus14.bee").read_text())
    elapsed = time.perf_counter() - t0
    assert {c.tag for c in res.model.live()} <= {"ordered"}
    assert res.cnf.num_vars == 2 and len(res.cnf.clauses) <= 2
    assert sorted(b["A"] for b in enumerate_models(res.cnf, res.varmap)) == [6, 7, 8]
    assert elapsed < 0.1


# ---------------------------------------------------------------- four-vertex VMTL graph

@pytest.mark.acceptance(SMALL_GRAPH)
def test_small_graph_solve_and_check(tmp_path, capsys):
    model = str(DATA / "vmtl_small.bee")
    out = tmp_path / "sol.txt"
    t0 = time.perf_counter()
    assert main(["solve", model, "-o", str(out)]) == 0
    assert time.perf_counter() - t0 < 1.0
    assert main(["check", model, str(out)]) == 0
    labels = parse_assignment(out.read_text(), declared_varmap(parse_model(Path(model).read_text())))
    assert vmtl_labels_ok(4, SMALL_GRAPH_EDGES, labels, 14)


@pytest.mark.acceptance(SMALL_GRAPH)
def test_small_graph_reference_labeling(tmp_path, capsys):
    sol = tmp_path / "reference.txt"
    sol.write_text("V1 = 4\nV2 = 5\nV3 = 1\nV4 = 6\nE1 = 7\nE2 = 3\nE3 = 2\nE4 = 8\nK = 14\n")
    assert main(["check", str(DATA / "vmtl_small.bee"), str(sol)]) == 0


@pytest.mark.acceptance(SMALL_GRAPH)
def test_small_graph_clause_reduction():
    text = (DATA / "vmtl_small.bee").read_text()
    got = {}
    for name, opts in (("default", CompileOptions()), ("no-simplify", CompileOptions(simplify=False))):
        res = compile_text(text, opts)
        got[name] = (res.cnf.num_vars, len(res.cnf.clauses))
    assert got == SMALL_GRAPH_GOLDEN
    assert 1 - got["default"][1] / got["no-simplify"][1] >= 0.40


# ---------------------------------------------------------------- DNA

DNA_VERDICTS = [("t", 14, True), ("t", 15, False), ("m", 8, True), ("m", 9, False)]


@pytest.fixture(scope="module")
def dna_runs():
    runs, t0 = {}, time.perf_counter()
    for part, size, _ in DNA_VERDICTS:
        res = compile_text(gen_dna(part, size))
        out = solve(res.cnf)
        runs[part, size] = (res, out)
    return runs, time.perf_counter() - t0


@pytest.mark.slow
@pytest.mark.acceptance(DNA)
def test_dna_verdicts_bundled(dna_runs):
    runs, elapsed = dna_runs
    for part, size, sat in DNA_VERDICTS:
        assert runs[part, size][1].sat == sat, (part, size)
    assert elapsed <= 300


@pytest.mark.slow
@pytest.mark.acceptance(DNA)
def test_dna_composed_words(dna_runs):
    runs, _ = dna_runs
    vecs = {}
    for part, size in (("t", 14), ("m", 8)):
        res, out = runs[part, size]
        bindings = decode(out.model, res.varmap)
        assert check(parse_model(gen_dna(part, size)), bindings) is None
        vecs[part] = dna_vectors(bindings, size)
    words = compose_words(vecs["t"], vecs["m"])
    assert len(words) == 112
    assert dna_words_ok(words)


@pytest.mark.slow
@pytest.mark.acceptance(DNA)
def test_dna_external_backend():
    pytest.importorskip("pysat")
    cmd = f"{shlex.quote(sys.executable)} {shlex.quote(str(ROOT / 'scripts' / 'pysat_dimacs.py'))} {{input}}"
    t0 = time.perf_counter()
    for part, size, sat in DNA_VERDICTS:
        assert solve(compile_text(gen_dna(part, size)).cnf, "external", cmd).sat == sat, (part, size)
    assert time.perf_counter() - t0 < 30


# ---------------------------------------------------------------- fuzz

@pytest.mark.acceptance(FUZZ)
def test_fuzz_500():
    rng = random.Random(20240)
    t0 = time.perf_counter()
    for i in range(500):
        source = parse_model(gen_random_model(rng))
        assert cnf_solution_set(source) == solution_set(source), i
    assert time.perf_counter() - t0 < 120


# ---------------------------------------------------------------- rules

@pytest.mark.acceptance(RULES)
@pytest.mark.parametrize("name", list(CASES))
def test_rule_soundness(name):
    rule, gen = CASES[name]
    fired, bad = run_case(rule, gen, seed=7 + len(name), want=50)
    assert bad == [] and fired >= 50


# ---------------------------------------------------------------- QCP

@pytest.mark.acceptance(QCP)
def test_planted_qcp_is_one_empty_clause():
    res = compile_text(gen_qcp(5, 10, 3, plant=True).to_model())
    assert res.cnf.to_dimacs() == "p cnf 0 1\n0\n"


@pytest.mark.acceptance(QCP)
def test_small_qcp_agree_with_oracle():
    verdicts = []
    for seed in range(100):
        unsat = seed % 2 == 1
        order = 3 + seed % 3
        inst = gen_qcp(order, 2 + seed % (order * order // 2), seed, unsat=unsat)
        want = qcp_complete(inst.grid) is not None
        assert solve(compile_text(inst.to_model()).cnf).sat == want, seed
        verdicts.append(want)
    assert verdicts.count(True) == 50 and verdicts.count(False) == 50


# ---------------------------------------------------------------- encodings

def _amo_model(n, k):
    names = [f"x{i}" for i in range(n)]
    return "".join(f"new_bool({x})\n" for x in names) + f"bool_array_sum_leq([{','.join(names)}],{k})\n"


def _sum_model(n, rng):
    out, names = [], []
    for i in range(n):
        lo = rng.randint(0, 1)
        out.append(f"new_int(i{i},{lo},{lo + rng.randint(0, 2 if n < 5 else 1)})")
        names.append(f"i{i}")
    out.append(f"new_int(s,0,{2 * n})")
    out.append(f"int_array_plus([{','.join(names)}],s)")
    return "\n".join(out) + "\n"


@pytest.mark.acceptance(ENC)
@pytest.mark.parametrize("n", range(1, 8))
def test_amo_encodings_agree(n):
    text = _amo_model(n, 1)
    sets = [text_solution_set(text, CompileOptions(simplify=False, amo=mode)) for mode in ("pairwise", "commander")]
    want = {t for t in product((False, True), repeat=n) if sum(t) <= 1}
    assert sets[0] == sets[1] == want


@pytest.mark.acceptance(ENC)
@pytest.mark.parametrize("n", range(1, 8))
def test_sum_encodings_agree(n):
    rng = random.Random(n)
    for _ in range(3):
        text = _sum_model(n, rng)
        sets = [text_solution_set(text, CompileOptions(simplify=s, plus=p))
                for s in (False, True) for p in ("oddeven", "totalizer")]
        assert all(x == sets[0] for x in sets)
        assert sets[0] == solution_set(parse_model(text))
    k = rng.randint(1, n)
    text = "".join(f"new_bool(x{i})\n" for i in range(n)) + f"bool_array_sum_eq([{','.join(f'x{i}' for i in range(n))}],{k})\n"
    sets = [text_solution_set(text, CompileOptions(simplify=False, plus=p)) for p in ("oddeven", "totalizer")]
    assert sets[0] == sets[1] == {t for t in product((False, True), repeat=n) if sum(t) == k}


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
