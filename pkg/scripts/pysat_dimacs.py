"""External backend shim: solve a DIMACS file with a PySAT solver and print
competition-style output (exit 10 SAT, 20 UNSAT).

    fdcompile solve model.bee --external-cmd "python scripts/pysat_dimacs.py {input}"
"""
import argparse
import sys

from pysat.formula import CNF
from pysat.solvers import Solver


def main(argv=None) -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("cnf")
    ap.add_argument("--solver", default="cadical153")
    ns = ap.parse_args(argv)
    f = CNF(from_file=ns.cnf)
    with Solver(name=ns.solver, bootstrap_with=f.clauses) as s:
        if not s.solve():
            print("s UNSATISFIABLE")
            return 20
        model = s.get_model() or []
    seen = {abs(x) for x in model}
    model += [-v for v in range(1, f.nv + 1) if v not in seen]
    print("s SATISFIABLE")
    print("v " + " ".join(map(str, model)) + " 0")
    return 10


if __name__ == "__main__":
    sys.exit(main())
