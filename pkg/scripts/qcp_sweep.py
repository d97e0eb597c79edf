"""Quasigroup completion: compile-time UNSAT on planted instances and
verdict agreement with the backtracking oracle on random ones.

    python scripts/qcp_sweep.py --order 5 --seeds 100
"""
import argparse
import time

from fdcompile.compiler import compile_text
from fdcompile.generators import gen_qcp, qcp_complete
from fdcompile.solver import solve


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--order", type=int, default=5)
    ap.add_argument("--holes", type=int, help="default: half the cells")
    ap.add_argument("--seeds", type=int, default=100)
    ns = ap.parse_args()
    holes = ns.holes if ns.holes is not None else ns.order * ns.order // 2
    planted = 0
    agree = sat = 0
    t0 = time.perf_counter()
    for seed in range(ns.seeds):
        res = compile_text(gen_qcp(ns.order, holes, seed, plant=True).to_model())
        planted += res.cnf.num_vars == 0 and res.cnf.clauses == [()]
        inst = gen_qcp(ns.order, holes, seed, unsat=seed % 2 == 1)
        want = qcp_complete(inst.grid) is not None
        got = solve(compile_text(inst.to_model()).cnf).sat
        agree += got == want
        sat += want
    print(f"order {ns.order}, {holes} holes, {ns.seeds} seeds: planted refuted at compile time {planted}/{ns.seeds}; "
          f"oracle agreement {agree}/{ns.seeds} ({sat} SAT); {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
