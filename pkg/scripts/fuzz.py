"""Differential fuzzing of the whole pipeline against the brute-force checker.

    python scripts/fuzz.py --models 2000 --seed 1
"""
import argparse
import random
import sys
import time
from dataclasses import dataclass, fields

from fdcompile.checker import solution_set
from fdcompile.compiler import CompileOptions, compile_source
from fdcompile.generators import gen_random_model
from fdcompile.parser import parse_model, render_model
from fdcompile.solver import enumerate_models

VARIANTS = {
    "default": CompileOptions(),
    "no-simplify": CompileOptions(simplify=False),
    "commander": CompileOptions(amo="commander"),
    "oddeven": CompileOptions(plus="oddeven"),
    "totalizer": CompileOptions(plus="totalizer"),
}


@dataclass
class FuzzConfig:
    models: int = 500
    seed: int = 0
    max_ints: int = 4
    max_dom: int = 6
    max_cons: int = 6


def cnf_solutions(source, opts):
    res = compile_source(source, opts)
    names = [d.args[0].ident for d in source.declarations()]
    return {tuple(b[n] for n in names) for b in enumerate_models(res.cnf, res.varmap)}


def main():
    ap = argparse.ArgumentParser()
    for f in fields(FuzzConfig):
        ap.add_argument(f"--{f.name.replace('_', '-')}", type=int, default=f.default)
    ap.add_argument("--variant", choices=list(VARIANTS), action="append")
    ns = ap.parse_args()
    cfg = FuzzConfig(ns.models, ns.seed, ns.max_ints, ns.max_dom, ns.max_cons)
    variants = ns.variant or list(VARIANTS)
    rng = random.Random(cfg.seed)
    t0 = time.perf_counter()
    sat = 0
    for i in range(cfg.models):
        text = gen_random_model(rng, cfg.max_ints, cfg.max_dom, cfg.max_cons)
        source = parse_model(text)
        want = solution_set(source)
        sat += bool(want)
        for v in variants:
            got = cnf_solutions(source, VARIANTS[v])
            if got != want:
                print(f"mismatch on model {i} ({v}):\n{render_model(source)}"
                      f"missing {sorted(want - got)[:5]} extra {sorted(got - want)[:5]}")
                return 1
    print(f"{cfg.models} models x {len(variants)} variants agree ({sat} satisfiable) "
          f"in {time.perf_counter() - t0:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
