"""Model generators: VMTL, DNA words, quasigroup completion, random fuzz
models; plus small independent oracles used to validate them."""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations

# ---------------------------------------------------------------- VMTL


def complete_graph(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def gen_vmtl(n: int, k: int, edges: list[tuple[int, int]] | None = None,
             symmetry: bool | None = None) -> str:
    """Vertex-magic total labeling of a graph on vertices 1..n.

    Without ``edges`` the graph is K_n and the symmetry-breaking constraints
    for complete graphs are added (unless ``symmetry`` is False).
    """
    complete = edges is None
    if complete:
        edges = complete_graph(n)
    if symmetry is None:
        symmetry = complete
    top = n + len(edges)
    vs = [f"V{i}" for i in range(1, n + 1)]
    es = [f"E{j}" for j in range(1, len(edges) + 1)]
    out = [f"new_int({v},1,{top})" for v in vs]
    out += [f"new_int({e},1,{top})" for e in es]
    out.append(f"new_int(K,{k},{k})")
    for i in range(1, n + 1):
        incident = [es[j] for j, (a, b) in enumerate(edges) if i in (a, b)]
        out.append(f"int_array_plus([{','.join([vs[i - 1]] + incident)}],K)")
    out.append(f"allDiff([{','.join(vs + es)}])")
    if symmetry:
        name = {tuple(sorted(e)): es[j] for j, e in enumerate(edges)}
        e12 = name[(1, 2)]
        for e in es:
            if e != e12:
                out.append(f"int_lt({e12},{e})")
        chain = [name[(1, j)] for j in range(2, n + 1) if (1, j) in name]
        for a, b in zip(chain, chain[1:]):
            out.append(f"int_lt({a},{b})")
        if (1, 3) in name:
            for j in range(3, n + 1):
                if (2, j) in name:
                    out.append(f"int_lt({name[(1, 3)]},{name[(2, j)]})")
    return "\n".join(out) + "\nsolve satisfy\n"


SMALL_GRAPH_EDGES = [(1, 2), (1, 3), (2, 3), (3, 4)]


def vmtl_labels_ok(n: int, edges, labels: dict[str, int], k: int) -> bool:
    """Independent check: a bijection onto 1..n+|E| with every vertex sum k."""
    vals = [labels[f"V{i}"] for i in range(1, n + 1)] + [labels[f"E{j}"] for j in range(1, len(edges) + 1)]
    if sorted(vals) != list(range(1, len(vals) + 1)):
        return False
    for i in range(1, n + 1):
        s = labels[f"V{i}"] + sum(labels[f"E{j + 1}"] for j, e in enumerate(edges) if i in e)
        if s != k:
            return False
    return True


# ---------------------------------------------------------------- DNA words


def gen_dna(part: str, size: int) -> str:
    """t-part: weight 4, pairwise distance >= 4.  m-part: pairwise distance
    >= 4 and reverse/complement distance >= 4 (including a word with itself).
    Both sets are lexicographically ordered."""
    if part not in ("t", "m"):
        raise ValueError("part must be 't' or 'm'")
    if size < 1:
        raise ValueError("size must be positive")
    words = [[f"w{i}_{k}" for k in range(8)] for i in range(size)]
    out = [f"new_bool({b})" for w in words for b in w]
    if part == "t":
        out += [f"bool_array_sum_eq([{','.join(w)}],4)" for w in words]
    cnt = 0

    def at_least_4(pairs):
        nonlocal cnt
        ds = []
        for x, y in pairs:
            d = f"d{cnt}"
            cnt += 1
            out.append(f"new_bool({d})")
            out.append(f"bool_xor_reif({x},{y},{d})")
            ds.append(d)
        out.append(f"bool_array_sum_geq([{','.join(ds)}],4)")

    for u, v in combinations(words, 2):
        at_least_4(zip(u, v))
    if part == "m":
        # reverse(u) differs from complement(v) at k  iff  u[7-k] == v[k]
        for i in range(size):
            for j in range(i, size):
                u, v = words[i], words[j]
                at_least_4((f"-{u[7 - k]}", v[k]) for k in range(8))
    for u, v in zip(words, words[1:]):
        out.append(f"bool_array_lex([{','.join(u)}],[{','.join(v)}])")
    return "\n".join(out) + "\nsolve satisfy\n"


def dna_vectors(bindings: dict, size: int) -> list[tuple[int, ...]]:
    return [tuple(int(bindings[f"w{i}_{k}"]) for k in range(8)) for i in range(size)]


# t=1 marks {C,G}; complementing a letter keeps t and flips m
_LETTER = {(1, 0): "C", (1, 1): "G", (0, 0): "A", (0, 1): "T"}
_COMPLEMENT = {"A": "T", "T": "A", "C": "G", "G": "C"}


def compose_words(ts, ms) -> list[str]:
    return ["".join(_LETTER[(t[k], m[k])] for k in range(8)) for t in ts for m in ms]


def dna_words_ok(words: list[str]) -> bool:
    """The original word conditions, checked letter by letter."""

    def dist(a, b):
        return sum(x != y for x, y in zip(a, b))

    if len(set(words)) != len(words):
        return False
    for w in words:
        if len(w) != 8 or sum(ch in "CG" for ch in w) != 4:
            return False
    for a, b in combinations(words, 2):
        if dist(a, b) < 4:
            return False
    for x in words:
        for y in words:
            if dist(x[::-1], "".join(_COMPLEMENT[ch] for ch in y)) < 4:
                return False
    return True


# ---------------------------------------------------------------- quasigroup completion


def latin_square(n: int, rng: random.Random) -> list[list[int]]:
    rows = list(range(n))
    cols = list(range(n))
    syms = list(range(n))
    rng.shuffle(rows)
    rng.shuffle(cols)
    rng.shuffle(syms)
    return [[syms[(rows[r] + cols[c]) % n] for c in range(n)] for r in range(n)]


def qcp_complete(grid: list[list[int | None]]) -> list[list[int]] | None:
    """Exhaustive backtracking completion of a partial Latin square."""
    n = len(grid)
    g = [row[:] for row in grid]
    for r in range(n):
        vals = [v for v in g[r] if v is not None]
        if len(set(vals)) < len(vals):
            return None
    for c in range(n):
        vals = [g[r][c] for r in range(n) if g[r][c] is not None]
        if len(set(vals)) < len(vals):
            return None
    holes = [(r, c) for r in range(n) for c in range(n) if g[r][c] is None]

    def options(r, c):
        used = set(g[r]) | {g[i][c] for i in range(n)}
        return [v for v in range(n) if v not in used]

    def search() -> bool:
        best = None
        for r, c in holes:
            if g[r][c] is None:
                opts = options(r, c)
                if best is None or len(opts) < len(best[2]):
                    best = (r, c, opts)
                    if not opts:
                        return False
        if best is None:
            return True
        r, c, opts = best
        for v in opts:
            g[r][c] = v
            if search():
                return True
        g[r][c] = None
        return False

    return g if search() else None


@dataclass
class QcpInstance:
    grid: list[list[int | None]]

    @property
    def order(self) -> int:
        return len(self.grid)

    def to_model(self) -> str:
        n = self.order
        name = lambda r, c: f"x{r}_{c}"  # noqa: E731
        cell = lambda r, c: name(r, c) if self.grid[r][c] is None else str(self.grid[r][c])  # noqa: E731
        out = [f"new_int({name(r, c)},0,{n - 1})"
               for r in range(n) for c in range(n) if self.grid[r][c] is None]
        for r in range(n):
            out.append(f"allDiff([{','.join(cell(r, c) for c in range(n))}])")
        for c in range(n):
            out.append(f"allDiff([{','.join(cell(r, c) for r in range(n))}])")
        return "\n".join(out) + "\nsolve satisfy\n"


def gen_qcp(order: int, holes: int, seed: int, plant: bool = False, unsat: bool = False) -> QcpInstance:
    """Random partial Latin square with ``holes`` blank cells.

    ``plant`` copies one given value onto another given cell of the same row,
    a contradiction visible without search.  ``unsat`` instead corrupts given
    cells until the exhaustive search finds no completion.
    """
    rng = random.Random(seed)
    square = latin_square(order, rng)
    cells = [(r, c) for r in range(order) for c in range(order)]
    blank = set(rng.sample(cells, min(holes, len(cells))))
    grid: list[list[int | None]] = [[None if (r, c) in blank else square[r][c] for c in range(order)]
                                    for r in range(order)]
    if plant:
        for r in range(order):
            given = [c for c in range(order) if grid[r][c] is not None]
            if len(given) >= 2:
                a, b = rng.sample(given, 2)
                grid[r][b] = grid[r][a]
                break
    elif unsat:
        given = [(r, c) for (r, c) in cells if grid[r][c] is not None]
        if not given or order < 2:
            raise ValueError("an unsatisfiable instance needs at least one given cell and order >= 2")
        for _ in range(500):
            if qcp_complete(grid) is None:
                break
            r, c = rng.choice(given)
            grid[r][c] = rng.choice([v for v in range(order) if v != square[r][c]])
        else:
            raise ValueError("could not make the instance unsatisfiable")
    return QcpInstance(grid)


# ---------------------------------------------------------------- random models

_RELS = ("leq", "geq", "eq", "lt", "gt", "neq")
_BOOL_OPS = ("or", "and", "xor", "iff")


def gen_random_model(rng: random.Random, max_ints: int = 4, max_dom: int = 6,
                     max_cons: int = 6, max_bools: int = 3) -> str:
    """Small random model over every statement template (for fuzzing)."""
    ni = rng.randint(1, max_ints)
    nb = rng.randint(0, max_bools)
    ints, bools, out = [], [], []
    for i in range(ni):
        lo = rng.randint(-2, 3)
        hi = lo + rng.randint(0, max_dom - 1)
        out.append(f"new_int(i{i},{lo},{hi})")
        ints.append(f"i{i}")
    for j in range(nb):
        out.append(f"new_bool(b{j})")
        bools.append(f"b{j}")

    def lit():
        if not bools or rng.random() < 0.08:
            return rng.choice(["1", "0"])
        b = rng.choice(bools)
        return f"-{b}" if rng.random() < 0.3 else b

    def lits(lo=0, hi=4):
        return "[" + ",".join(lit() for _ in range(rng.randint(lo, hi))) + "]"

    def term():
        r = rng.random()
        if r < 0.2:
            return str(rng.randint(-2, 6))
        v = rng.choice(ints)
        return f"-{v}" if r > 0.9 else v

    def terms(lo=0, hi=4):
        return "[" + ",".join(term() for _ in range(rng.randint(lo, hi))) + "]"

    makers = [
        lambda: f"ordered({lits(0, 4)})",
        lambda: f"bool_eq({lit()},{lit()})",
        lambda: f"bool_array_lex({lits()},{lits()})",
        lambda: f"bool_array_{rng.choice(_BOOL_OPS)}({lits(0, 4)})",
        lambda: f"bool_array_{rng.choice(_BOOL_OPS)}_reif({lits(0, 4)},{lit()})",
        lambda: f"bool_{rng.choice(_BOOL_OPS)}_reif({lit()},{lit()},{lit()})",
        lambda: f"int_{rng.choice(_RELS)}({term()},{term()})",
        lambda: f"int_{rng.choice(_RELS)}_reif({term()},{term()},{lit()})",
        lambda: f"bool_array_sum_{rng.choice(_RELS)}({lits(0, 5)},{term()})",
        lambda: f"int_{rng.choice(('plus', 'times', 'max', 'min'))}({term()},{term()},{term()})",
        lambda: f"int_{rng.choice(('div', 'mod'))}({term()},{rng.choice(['1', '2', '3', '-2', rng.choice(ints)])},{term()})",
        lambda: f"int_array_{rng.choice(('plus', 'max', 'min'))}({terms(1, 4)},{term()})",
        lambda: f"allDiff({terms(0, 4)})",
        lambda: f"comparator({lit()},{lit()},{lit()},{lit()})",
    ]
    for _ in range(rng.randint(0, max_cons)):
        out.append(rng.choice(makers)())
    return "\n".join(out) + "\n"
