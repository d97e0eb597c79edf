"""Labeling counts and clause counts for VMTL instances.

    python scripts/vmtl_counts.py            # four-vertex graph and K_4 sweeps
    python scripts/vmtl_counts.py --n 5 --k 40 --solve
"""
import argparse
import time
from dataclasses import dataclass

from fdcompile.compiler import CompileOptions, compile_text
from fdcompile.generators import SMALL_GRAPH_EDGES, complete_graph, gen_vmtl, vmtl_labels_ok
from fdcompile.solver import enumerate_models, solve, decode


@dataclass
class Config:
    n: int = 4
    k: int | None = None
    solve: bool = False
    symmetry: bool = True


def sizes(text):
    out = {}
    for name, opts in (("default", CompileOptions()), ("no-simplify", CompileOptions(simplify=False))):
        res = compile_text(text, opts)
        out[name] = (res.cnf.num_vars, len(res.cnf.clauses))
    return out


def small_graph_report():
    for k in range(10, 20):
        res = compile_text(gen_vmtl(4, k, SMALL_GRAPH_EDGES))
        sols = list(enumerate_models(res.cnf, res.varmap))
        assert all(vmtl_labels_ok(4, SMALL_GRAPH_EDGES, s, k) for s in sols)
        print(f"small graph k={k}: {len(sols)} labelings")
    s = sizes(gen_vmtl(4, 14, SMALL_GRAPH_EDGES))
    d, raw = s["default"], s["no-simplify"]
    print(f"small graph k=14: default vars={d[0]} clauses={d[1]}; no-simplify vars={raw[0]} clauses={raw[1]}; "
          f"reduction {100 * (1 - d[1] / raw[1]):.1f}%")


def sweep(cfg: Config):
    n = cfg.n
    edges = complete_graph(n)
    top = n + len(edges)
    # every vertex sum is k, so n*k = sum(1..top) + sum(edge labels)
    lo, hi = (top * (top + 1) // 2 + sum(range(1, len(edges) + 1))) // n, \
        (top * (top + 1) // 2 + sum(range(top - len(edges) + 1, top + 1))) // n + 1
    for k in ([cfg.k] if cfg.k is not None else range(lo, hi + 1)):
        text = gen_vmtl(n, k, symmetry=cfg.symmetry)
        t0 = time.perf_counter()
        res = compile_text(text)
        if cfg.solve:
            out = solve(res.cnf)
            found = decode(out.model, res.varmap) if out.sat else None
            ok = found is None or vmtl_labels_ok(n, edges, found, k)
            print(f"K{n} k={k}: {'SAT' if found else 'UNSAT'} check={ok} {time.perf_counter() - t0:.2f}s "
                  f"vars={res.cnf.num_vars} clauses={len(res.cnf.clauses)}")
        else:
            count = sum(1 for _ in enumerate_models(res.cnf, res.varmap))
            print(f"K{n} k={k}: {count} labelings {time.perf_counter() - t0:.2f}s")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--k", type=int)
    ap.add_argument("--solve", action="store_true", help="one solution instead of a full count")
    ap.add_argument("--no-symmetry", action="store_true")
    ns = ap.parse_args()
    if ns.n == 4 and ns.k is None and not ns.solve:
        small_graph_report()
    sweep(Config(ns.n, ns.k, ns.solve, not ns.no_symmetry))


if __name__ == "__main__":
    main()
