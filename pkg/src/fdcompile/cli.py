"""Command-line front end: compile, solve, check and the benchmark generators."""
from __future__ import annotations

import argparse
import multiprocessing
import re
import sys
from dataclasses import dataclass
from pathlib import Path

from .checker import check
from .compiler import CompileOptions, CompileResult, compile_source
from .core import CompileError
from .encode import VarMap, VarMapEntry
from .generators import SMALL_GRAPH_EDGES, gen_dna, gen_qcp, gen_vmtl
from .parser import AssignmentError, ParseError, SourceModel, parse_assignment, parse_model, render_assignment
from .solver import BackendError, DecodeError, decode, solve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BACKEND = 2
EXIT_VIOLATION = 3
EXIT_UNSAT = 20

UNSAT_BANNER = "=====UNSATISFIABLE====="


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class SolveOptions:
    backend: str = "bundled"
    command: str | None = None
    timeout: float | None = None


def stats_line(res: CompileResult) -> str:
    return f"c vars={res.cnf.num_vars} clauses={len(res.cnf.clauses)} compile_ms={res.millis:.1f}"


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _compile_options(ns) -> CompileOptions:
    return CompileOptions(simplify=not ns.no_simplify, amo=ns.amo, plus=ns.plus,
                          hybrid_threshold=ns.hybrid_threshold)


def _solve_options(ns) -> SolveOptions:
    backend = "external" if ns.external_cmd and ns.backend == "bundled" else ns.backend
    return SolveOptions(backend, ns.external_cmd, ns.timeout)


def declared_varmap(source: SourceModel) -> VarMap:
    """Names and ranges of the declarations, without any bit layout."""
    entries = []
    for d in source.declarations():
        if d.name == "new_bool":
            entries.append(VarMapEntry(d.args[0].ident, "bool", 0, 1))
        else:
            entries.append(VarMapEntry(d.args[0].ident, "int", d.args[1].value, d.args[2].value))
    return VarMap(entries)


def solve_text(text: str, copts: CompileOptions, sopts: SolveOptions) -> dict | None:
    """Compile, solve and decode; None when unsatisfiable."""
    res = compile_source(parse_model(text), copts)
    out = solve(res.cnf, sopts.backend, sopts.command, sopts.timeout)
    if not out.sat:
        return None
    return decode(out.model, res.varmap)


# ---------------------------------------------------------------- portfolio

def split_model(text: str, var: str | None, parts: int) -> list[str]:
    """Partition the range of one integer variable into ``parts`` slices,
    one sub-model per slice."""
    source = parse_model(text)
    ints = [d for d in source.declarations() if d.name == "new_int"]
    if var is None:
        ints = [d for d in ints if d.args[1].value < d.args[2].value]
        if not ints:
            return [text]
        decl = ints[0]
    else:
        found = [d for d in ints if d.args[0].ident == var]
        if not found:
            raise CompileError(f"no integer variable {var!r} to split on")
        decl = found[0]
    name, lo, hi = decl.args[0].ident, decl.args[1].value, decl.args[2].value
    width = hi - lo + 1
    parts = max(1, min(parts, width))
    body = re.sub(r"^\s*solve\s+satisfy\s*$", "", text, flags=re.M).rstrip()
    out = []
    for i in range(parts):
        a = lo + i * width // parts
        b = lo + (i + 1) * width // parts - 1
        out.append(f"{body}\nint_geq({name},{a})\nint_leq({name},{b})\n")
    return out


def _portfolio_job(job):
    text, copts, sopts = job
    try:
        return "ok", solve_text(text, copts, sopts)
    except Exception as exc:  # reported in the parent
        return "error", exc


def solve_portfolio(text: str, var: str | None, parts: int, copts: CompileOptions,
                    sopts: SolveOptions) -> dict | None:
    """First satisfiable slice wins; all slices unsatisfiable means UNSAT."""
    jobs = [(t, copts, sopts) for t in split_model(text, var, parts)]
    errors = []
    with multiprocessing.get_context("spawn").Pool(len(jobs)) as pool:
        for kind, value in pool.imap_unordered(_portfolio_job, jobs):
            if kind == "error":
                errors.append(value)
            elif value is not None:
                pool.terminate()
                return value
    if errors:
        raise errors[0]
    return None


# ---------------------------------------------------------------- commands

def cmd_compile(ns) -> int:
    res = compile_source(parse_model(_read(ns.model)), _compile_options(ns))
    _write(ns.output, res.cnf.to_dimacs())
    map_path = ns.map
    if map_path is None and ns.output not in (None, "-"):
        map_path = str(Path(ns.output).with_suffix(".map"))
    if map_path is not None:
        Path(map_path).write_text(res.varmap.to_text())
    stream = sys.stderr if ns.output in (None, "-") else sys.stdout
    print(stats_line(res), file=stream)
    return EXIT_OK


def cmd_solve(ns) -> int:
    text = _read(ns.model)
    copts, sopts = _compile_options(ns), _solve_options(ns)
    if ns.portfolio and ns.portfolio > 1:
        bindings = solve_portfolio(text, ns.split_var, ns.portfolio, copts, sopts)
    else:
        bindings = solve_text(text, copts, sopts)
    if bindings is None:
        _write(ns.output, UNSAT_BANNER + "\n")
        return EXIT_UNSAT
    _write(ns.output, render_assignment(bindings))
    return EXIT_OK


def cmd_check(ns) -> int:
    source = parse_model(_read(ns.model))
    bindings = parse_assignment(_read(ns.bindings), declared_varmap(source))
    v = check(source, bindings)
    if v is None:
        print("ok")
        return EXIT_OK
    print(str(v))
    return EXIT_VIOLATION


def cmd_gen_vmtl(ns) -> int:
    if ns.small:
        text = gen_vmtl(4, ns.k, SMALL_GRAPH_EDGES)
    else:
        if ns.n < 3:
            raise CompileError("gen-vmtl needs at least 3 vertices")
        text = gen_vmtl(ns.n, ns.k, symmetry=not ns.no_symmetry)
    _write(ns.output, text)
    return EXIT_OK


def cmd_gen_qcp(ns) -> int:
    inst = gen_qcp(ns.order, ns.holes, ns.seed, plant=ns.plant, unsat=ns.unsat)
    _write(ns.output, inst.to_model())
    return EXIT_OK


def cmd_gen_dna(ns) -> int:
    _write(ns.output, gen_dna(ns.part, ns.size))
    return EXIT_OK


def _add_compile_flags(p):
    p.add_argument("--no-simplify", action="store_true", help="skip equi-propagation and partial evaluation")
    p.add_argument("--amo", choices=("pairwise", "commander"), default="pairwise")
    p.add_argument("--plus", choices=("oddeven", "totalizer", "hybrid"), default="hybrid")
    p.add_argument("--hybrid-threshold", type=int, default=8, metavar="N")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="fdcompile", description="Finite-domain constraint models to CNF.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compile", help="emit DIMACS and a VarMap")
    p.add_argument("model")
    p.add_argument("-o", "--output", help="DIMACS path (default stdout)")
    p.add_argument("--map", help="VarMap path (default: next to the DIMACS file)")
    _add_compile_flags(p)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("solve", help="compile, solve and print bindings")
    p.add_argument("model")
    p.add_argument("-o", "--output")
    _add_compile_flags(p)
    p.add_argument("--backend", choices=("bundled", "external"), default="bundled")
    p.add_argument("--external-cmd", help="solver command; {input} is replaced by the DIMACS path")
    p.add_argument("--timeout", type=float, help="external solver timeout in seconds")
    p.add_argument("--portfolio", type=int, default=0, metavar="N", help="split into N slices solved in parallel")
    p.add_argument("--split-var", help="integer variable to split on (default: first non-constant)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="evaluate bindings against a model")
    p.add_argument("model")
    p.add_argument("bindings")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen-vmtl", help="vertex-magic total labeling of K_n")
    p.add_argument("n", type=int, nargs="?", default=4)
    p.add_argument("k", type=int)
    p.add_argument("--small", action="store_true", help="the 4-vertex, 4-edge graph (edges 12, 13, 23, 34) instead of K_n")
    p.add_argument("--no-symmetry", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen_vmtl)

    p = sub.add_parser("gen-qcp", help="random quasigroup completion instance")
    p.add_argument("order", type=int)
    p.add_argument("holes", type=int)
    p.add_argument("seed", type=int)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--plant", action="store_true", help="duplicate a given value in one row")
    g.add_argument("--unsat", action="store_true", help="corrupt givens until no completion exists")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen_qcp)

    p = sub.add_parser("gen-dna", help="DNA word template (t) or map (m) part")
    p.add_argument("part", choices=("t", "m"))
    p.add_argument("size", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen_dna)
    return ap


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        return ns.func(ns)
    except (ParseError, CompileError, AssignmentError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BackendError, DecodeError) as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND


if __name__ == "__main__":
    raise SystemExit(main())
