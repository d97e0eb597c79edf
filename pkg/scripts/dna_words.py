"""DNA word design in two parts: solve the t- and m-part models, compose the
words and check them against the original letter conditions.

    python scripts/dna_words.py --t 14 --m 8
    python scripts/dna_words.py --external-cmd "python scripts/pysat_dimacs.py {input}"
"""
import argparse
import time

from fdcompile.compiler import compile_text
from fdcompile.generators import compose_words, dna_vectors, dna_words_ok, gen_dna
from fdcompile.solver import decode, solve


def run(part, size, backend, command):
    t0 = time.perf_counter()
    res = compile_text(gen_dna(part, size))
    compiled = time.perf_counter() - t0
    out = solve(res.cnf, backend, command)
    total = time.perf_counter() - t0
    print(f"{part}-part size {size}: {'SAT' if out.sat else 'UNSAT'} vars={res.cnf.num_vars} "
          f"clauses={len(res.cnf.clauses)} compile={compiled:.2f}s total={total:.2f}s")
    return dna_vectors(decode(out.model, res.varmap), size) if out.sat else None


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--t", type=int, default=14)
    ap.add_argument("--m", type=int, default=8)
    ap.add_argument("--external-cmd")
    ap.add_argument("--show", action="store_true", help="print the composed words")
    ns = ap.parse_args()
    backend = "external" if ns.external_cmd else "bundled"
    ts = run("t", ns.t, backend, ns.external_cmd)
    run("t", ns.t + 1, backend, ns.external_cmd)
    ms = run("m", ns.m, backend, ns.external_cmd)
    run("m", ns.m + 1, backend, ns.external_cmd)
    if ts and ms:
        words = compose_words(ts, ms)
        print(f"{len(words)} composed words, conditions hold: {dna_words_ok(words)}")
        if ns.show:
            print("\n".join(words))


if __name__ == "__main__":
    main()
