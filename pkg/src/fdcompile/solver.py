"""SAT backends: a bundled CDCL solver, DIMACS I/O, an external-process
adapter, and decoding of assignments back to model bindings."""
from __future__ import annotations

import heapq
import os
import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .encode import Cnf, VarMap


class BackendError(Exception):
    """The SAT backend failed; never to be read as UNSAT."""


class DecodeError(Exception):
    """An assignment violates the order encoding (an encoder bug signal)."""


@dataclass
class SolveResult:
    status: str  # "SAT" | "UNSAT"
    # model[v] for v in 1..num_vars; index 0 unused
    model: list[bool] = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def sat(self) -> bool:
        return self.status == "SAT"

    def value(self, lit: int) -> bool:
        v = self.model[abs(lit)]
        return v if lit > 0 else not v


# ---------------------------------------------------------------- CDCL

def _code(x: int) -> int:
    return 2 * x if x > 0 else -2 * x + 1


class CdclSolver:
    """Conflict-driven clause learning with two watched literals, VSIDS,
    phase saving, geometric restarts and LBD-based learnt clause reduction.

    Literals are coded internally as 2v (positive) and 2v+1 (negative).
    Clauses may be added between calls to :meth:`solve`.
    """

    def __init__(self, num_vars: int = 0, clauses: Iterable[Sequence[int]] = ()):
        self.value: list[int] = [0, 0]  # per literal code: 1 true, -1 false, 0 unset
        self.level: list[int] = [0]
        self.reason: list = [None]
        self.activity: list[float] = [0.0]
        self.phase: list[int] = [0]
        self.seen: list[bool] = [False]
        self.watches: list[list] = [[], []]
        self.clauses: list[list[int]] = []
        self.learnts: list[list[int]] = []
        self.lbd: dict[int, int] = {}
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.heap: list[tuple[float, int]] = []
        self.var_inc = 1.0
        self.ok = True
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        self.ensure_vars(num_vars)
        for cl in clauses:
            self.add_clause(cl)

    @property
    def num_vars(self) -> int:
        return len(self.level) - 1

    def ensure_vars(self, n: int) -> None:
        while self.num_vars < n:
            v = self.num_vars + 1
            self.value += [0, 0]
            self.level.append(0)
            self.reason.append(None)
            self.activity.append(0.0)
            self.phase.append(0)
            self.seen.append(False)
            self.watches += [[], []]
            heapq.heappush(self.heap, (0.0, v))

    # -- clause database

    def add_clause(self, lits: Sequence[int]) -> bool:
        """Add a clause (DIMACS literals). Returns False once the formula is UNSAT."""
        if not self.ok:
            return False
        self._backtrack(0)
        self.ensure_vars(max((abs(x) for x in lits), default=0))
        value = self.value
        cl: list[int] = []
        for x in lits:
            p = _code(x)
            if value[p] == 1 or (p ^ 1) in cl:
                return True
            if value[p] == 0 and p not in cl:
                cl.append(p)
        if not cl:
            self.ok = False
            return False
        if len(cl) == 1:
            self._enqueue(cl[0], None)
            if self._propagate() is not None:
                self.ok = False
            return self.ok
        self.clauses.append(cl)
        self.watches[cl[0]].append(cl)
        self.watches[cl[1]].append(cl)
        return True

    # -- assignment

    def _enqueue(self, p: int, reason) -> None:
        self.value[p] = 1
        self.value[p ^ 1] = -1
        v = p >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(p)

    def _backtrack(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        value, phase, reason, heap, act = self.value, self.phase, self.reason, self.heap, self.activity
        start = self.trail_lim[lvl]
        for p in self.trail[start:]:
            v = p >> 1
            value[p] = 0
            value[p ^ 1] = 0
            reason[v] = None
            phase[v] = p & 1
            heapq.heappush(heap, (-act[v], v))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = start

    def _propagate(self):
        value, watches, trail = self.value, self.watches, self.trail
        level, reason = self.level, self.reason
        dl = len(self.trail_lim)
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if value[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lit = c[k]
                    if value[lit] != -1:
                        c[1] = lit
                        c[k] = false_lit
                        watches[lit].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if value[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(trail)
                        return c
                    value[first] = 1
                    value[first ^ 1] = -1
                    v = first >> 1
                    level[v] = dl
                    reason[v] = c
                    trail.append(first)
            del ws[j:]
        return None

    # -- conflict analysis

    def _bump(self, v: int) -> None:
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for u in range(1, len(act)):
                act[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-act[u], u) for u in range(1, len(act)) if self.value[2 * u] == 0]
            heapq.heapify(self.heap)
        elif self.value[2 * v] == 0:
            heapq.heappush(self.heap, (-act[v], v))

    def _analyze(self, confl):
        seen, level, reason, trail = self.seen, self.level, self.reason, self.trail
        dl = len(self.trail_lim)
        learnt = [0]
        path = 0
        p = -1
        idx = len(trail) - 1
        while True:
            start = 0 if p == -1 else 1
            for k in range(start, len(confl)):
                q = confl[k]
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    self._bump(v)
                    seen[v] = True
                    if level[v] >= dl:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            confl = reason[p >> 1]
            seen[p >> 1] = False
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1
        # drop literals implied by the rest of the clause (local minimisation)
        out = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r is None or any(not seen[x >> 1] and level[x >> 1] > 0 for x in r[1:]):
                out.append(q)
        for q in learnt[1:]:
            seen[q >> 1] = False
        if len(out) == 1:
            return out, 0, 1
        best = max(range(1, len(out)), key=lambda k: level[out[k] >> 1])
        out[1], out[best] = out[best], out[1]
        lbd = len({level[x >> 1] for x in out})
        return out, level[out[1] >> 1], lbd

    # -- search

    def _pick(self) -> int:
        heap, value = self.heap, self.value
        while heap:
            _, v = heapq.heappop(heap)
            if value[2 * v] == 0:
                return 2 * v + self.phase[v]
        for v in range(1, self.num_vars + 1):
            if value[2 * v] == 0:
                return 2 * v + self.phase[v]
        return -1

    def _reduce(self) -> None:
        reason = self.reason
        locked = {id(reason[c[0] >> 1]) for c in self.learnts if reason[c[0] >> 1] is c}
        ranked = sorted(self.learnts, key=lambda c: self.lbd[id(c)])
        keep, drop_budget = [], len(ranked) // 2
        for c in reversed(ranked):
            if drop_budget > 0 and self.lbd[id(c)] > 2 and id(c) not in locked:
                drop_budget -= 1
                del self.lbd[id(c)]
            else:
                keep.append(c)
        self.learnts = keep
        ws = [[] for _ in self.watches]
        for c in self.clauses:
            ws[c[0]].append(c)
            ws[c[1]].append(c)
        for c in self.learnts:
            ws[c[0]].append(c)
            ws[c[1]].append(c)
        self.watches = ws

    def solve(self, max_conflicts: int | None = None) -> bool | None:
        """True (SAT), False (UNSAT) or None when the conflict budget ran out."""
        if not self.ok:
            return False
        self._backtrack(0)
        if self._propagate() is not None:
            self.ok = False
            return False
        restart_limit = 100.0
        next_reduce = 2000 + len(self.learnts)
        budget = None if max_conflicts is None else self.conflicts + max_conflicts
        since_restart = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                since_restart += 1
                if not self.trail_lim:
                    self.ok = False
                    return False
                learnt, back, lbd = self._analyze(confl)
                self._backtrack(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self.learnts.append(learnt)
                    self.lbd[id(learnt)] = lbd
                    self.watches[learnt[0]].append(learnt)
                    self.watches[learnt[1]].append(learnt)
                    self._enqueue(learnt[0], learnt)
                self.var_inc *= 1.05
                if budget is not None and self.conflicts >= budget:
                    self._backtrack(0)
                    return None
                continue
            if since_restart >= restart_limit:
                since_restart = 0
                restart_limit *= 1.5
                self._backtrack(0)
                if len(self.learnts) >= next_reduce:
                    self._reduce()
                    next_reduce = int(next_reduce * 1.1) + 300
                continue
            p = self._pick()
            if p < 0:
                return True
            self.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(p, None)

    def model(self) -> list[bool]:
        return [False] + [self.value[2 * v] == 1 for v in range(1, self.num_vars + 1)]


# ---------------------------------------------------------------- DIMACS

def parse_dimacs(text: str) -> Cnf:
    num_vars = 0
    clauses: list[tuple[int, ...]] = []
    cur: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line[0] in "c%":
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad DIMACS header: {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            x = int(tok)
            if x == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(x)
    if cur:
        clauses.append(tuple(cur))
    return Cnf(num_vars, clauses)


def solve_bundled(cnf: Cnf, max_conflicts: int | None = None) -> SolveResult:
    s = CdclSolver(cnf.num_vars, cnf.clauses)
    verdict = s.solve(max_conflicts)
    stats = {"conflicts": s.conflicts, "decisions": s.decisions, "propagations": s.propagations}
    if verdict is None:
        raise BackendError("conflict budget exhausted")
    if not verdict:
        return SolveResult("UNSAT", stats=stats)
    return SolveResult("SAT", s.model()[: cnf.num_vars + 1], stats)


def parse_solver_output(text: str, num_vars: int, returncode: int | None = None) -> SolveResult:
    """Read competition-style output: an ``s`` status line and ``v`` value lines."""
    status = None
    vals: dict[int, bool] = {}
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("s "):
            word = line[2:].strip()
            if word == "SATISFIABLE":
                status = "SAT"
            elif word == "UNSATISFIABLE":
                status = "UNSAT"
            else:
                raise BackendError(f"unrecognised status line {line!r}")
        elif line.startswith("v "):
            for tok in line[2:].split():
                x = int(tok)
                if x != 0:
                    vals[abs(x)] = x > 0
    if status is None:
        if returncode == 10:
            status = "SAT"
        elif returncode == 20:
            status = "UNSAT"
        else:
            raise BackendError("solver produced no status line")
    if status == "UNSAT":
        return SolveResult("UNSAT")
    if len([v for v in vals if v <= num_vars]) < num_vars:
        raise BackendError("solver output lacks values for some variables")
    return SolveResult("SAT", [False] + [vals[v] for v in range(1, num_vars + 1)])


def solve_external(cnf: Cnf, command: str, timeout: float | None = None) -> SolveResult:
    """Run ``command`` on a temporary DIMACS file.

    ``{input}`` in the command is replaced by the file path; without it the
    path is appended as the last argument.
    """
    fd, path = tempfile.mkstemp(suffix=".cnf")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(cnf.to_dimacs())
        if "{input}" in command:
            argv = [a.replace("{input}", path) for a in shlex.split(command)]
        else:
            argv = shlex.split(command) + [path]
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise BackendError(f"external solver failed: {exc}") from exc
        if proc.returncode not in (0, 10, 20):
            raise BackendError(f"external solver exited with {proc.returncode}: {proc.stderr.strip()}")
        return parse_solver_output(proc.stdout, cnf.num_vars, proc.returncode)
    finally:
        os.unlink(path)


def solve(cnf: Cnf, backend: str = "bundled", command: str | None = None,
          timeout: float | None = None) -> SolveResult:
    if cnf.clauses == [()] or any(len(cl) == 0 for cl in cnf.clauses):
        return SolveResult("UNSAT")
    if backend == "bundled":
        return solve_bundled(cnf)
    if backend == "external":
        if not command:
            raise BackendError("external backend needs a command")
        return solve_external(cnf, command, timeout)
    raise BackendError(f"unknown backend {backend!r}")


def format_result(res: SolveResult) -> str:
    if not res.sat:
        return "s UNSATISFIABLE\n"
    lits = [str(v if res.model[v] else -v) for v in range(1, len(res.model))]
    return "s SATISFIABLE\nv " + " ".join(lits + ["0"]) + "\n"


# ---------------------------------------------------------------- decoding

def decode(model: Sequence[bool], varmap: VarMap) -> dict[str, int | bool]:
    """Read declared values from a solver model (``model[id]`` per solver id)."""
    out: dict[str, int | bool] = {}
    for e in varmap.entries:
        bits = []
        for t in e.tokens:
            if t is True or t is False:
                bits.append(t)
            else:
                bits.append(model[abs(t)] if t > 0 else not model[abs(t)])
        if e.kind == "bool":
            out[e.name] = bits[0]
            continue
        if any(not a and b for a, b in zip(bits, bits[1:])):
            raise DecodeError(f"{e.name}: bits {bits} are not ordered")
        out[e.name] = e.lo + sum(bits)
    return out


def enumerate_models(cnf: Cnf, varmap: VarMap, limit: int | None = None):
    """All solutions projected onto the declared variables (blocking clauses)."""
    if cnf.clauses == [()]:
        return
    s = CdclSolver(cnf.num_vars, cnf.clauses)
    ids = sorted({abs(t) for e in varmap.entries for t in e.tokens if not isinstance(t, bool)})
    found = 0
    while s.solve():
        model = s.model()
        yield decode(model, varmap)
        found += 1
        if limit is not None and found >= limit:
            return
        if not ids or not s.add_clause([-v if model[v] else v for v in ids]):
            return


def main(argv: list[str] | None = None) -> int:
    """``python -m fdcompile.solver file.cnf``: competition-style output."""
    import sys

    args = sys.argv[1:] if argv is None else argv
    if len(args) != 1:
        print("usage: python -m fdcompile.solver FILE.cnf", file=sys.stderr)
        return 1
    with open(args[0]) as fh:
        cnf = parse_dimacs(fh.read())
    res = solve(cnf)
    sys.stdout.write(format_result(res))
    return 10 if res.sat else 20


if __name__ == "__main__":
    raise SystemExit(main())
