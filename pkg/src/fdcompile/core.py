"""Literals, the literal equivalence store, integer representations and the
constraint container shared by every compilation phase.

Literals are plain signed ints.  Variable 1 is reserved as the truth
constant, so ``TRUE == 1`` and ``FALSE == -1``; every other positive int is a
Boolean variable and its negation is the unary minus.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

TRUE = 1
FALSE = -1


def negate(lit: int) -> int:
    return -lit


def is_const(lit: int) -> bool:
    return lit == TRUE or lit == FALSE


class CompileError(Exception):
    """Raised for models that cannot be compiled (bad domains, division by zero, ...)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}" if line is not None else message)

    def __reduce__(self):
        return (type(self), (self.message, self.line))


class LiteralStore:
    """Polarity-aware union-find over literals.

    ``parent[v]`` holds a signed literal; ``v`` is a root when ``parent[v] == v``.
    Var 1 (the truth constant) is always the root of its class.
    """

    def __init__(self) -> None:
        self.parent: list[int] = [0, 1]
        self.inconsistent = False
        self.version = 0
        # vars that stopped being roots since the last drain
        self.touched: list[int] = []

    @property
    def num_vars(self) -> int:
        return len(self.parent) - 1

    def new_var(self) -> int:
        v = len(self.parent)
        self.parent.append(v)
        return v

    def new_vars(self, n: int) -> list[int]:
        start = len(self.parent)
        self.parent.extend(range(start, start + n))
        return list(range(start, start + n))

    def resolve(self, lit: int) -> int:
        parent = self.parent
        v = lit if lit > 0 else -lit
        p = parent[v]
        if p == v:
            return lit
        # find root, tracking polarity relative to v
        path = []
        sign = 1
        while True:
            path.append(v)
            if p < 0:
                sign = -sign
                p = -p
            if parent[p] == p:
                break
            v = p
            p = parent[v]
        root = p
        # compress: each node on the path points straight at the root
        s = sign
        for node in path:
            q = parent[node]
            parent[node] = s * root
            if q < 0:
                s = -s
        return sign * root if lit > 0 else -sign * root

    def value(self, lit: int) -> bool | None:
        r = self.resolve(lit)
        if r == TRUE:
            return True
        if r == FALSE:
            return False
        return None

    def union(self, a: int, b: int) -> bool:
        """Equate literals ``a`` and ``b``; returns True if the store changed."""
        ra = self.resolve(a)
        rb = self.resolve(b)
        if ra == rb:
            return False
        if ra == -rb:
            if not self.inconsistent:
                self.inconsistent = True
                self.version += 1
            return True
        va, vb = abs(ra), abs(rb)
        # keep the constant (then the older variable) as representative
        if va == 1 or (vb != 1 and va < vb):
            child, target = rb, ra
        else:
            child, target = ra, rb
        cv = abs(child)
        self.parent[cv] = target if child > 0 else -target
        self.touched.append(cv)
        self.version += 1
        return True

    def drain_touched(self) -> list[int]:
        t, self.touched = self.touched, []
        return t


@dataclass(frozen=True)
class IntVar:
    """Order-encoded integer: ``bits[i]`` means ``value >= lo + i + 1``."""

    lo: int
    bits: tuple[int, ...] = ()

    @property
    def hi(self) -> int:
        return self.lo + len(self.bits)

    @property
    def size(self) -> int:
        return len(self.bits)

    def is_const(self) -> bool:
        return not self.bits

    def ge(self, v: int) -> int:
        """Literal for ``value >= v``."""
        if v <= self.lo:
            return TRUE
        if v > self.hi:
            return FALSE
        return self.bits[v - self.lo - 1]

    def shift(self, k: int) -> IntVar:
        return IntVar(self.lo + k, self.bits)

    def negated(self) -> IntVar:
        return IntVar(-self.hi, tuple(-b for b in reversed(self.bits)))

    def last_bit(self) -> int:
        return self.bits[-1] if self.bits else TRUE

    def resolved(self, store: LiteralStore) -> IntVar:
        return IntVar(self.lo, tuple(store.resolve(b) for b in self.bits))

    @staticmethod
    def const(c: int) -> IntVar:
        return IntVar(c, ())


def tighten(iv: IntVar, store: LiteralStore) -> IntVar:
    """Resolve ``iv`` and strip constant bits, forcing order on the way.

    A TRUE bit forces every earlier bit TRUE and a FALSE bit every later bit
    FALSE (both implied by orderedness).  The result has no constant bits
    unless the store became inconsistent.
    """
    bits = [store.resolve(b) for b in iv.bits]
    last_true = -1
    first_false = len(bits)
    for i, b in enumerate(bits):
        if b == TRUE:
            last_true = i
        elif b == FALSE and first_false == len(bits):
            first_false = i
    if last_true >= first_false:
        store.union(TRUE, FALSE)
        return IntVar(iv.lo, tuple(bits))
    for i in range(last_true):
        if bits[i] != TRUE:
            store.union(bits[i], TRUE)
    for i in range(first_false + 1, len(bits)):
        if bits[i] != FALSE:
            store.union(bits[i], FALSE)
    return IntVar(iv.lo + last_true + 1, tuple(store.resolve(b) for b in bits[last_true + 1:first_false]))


def current_bounds(iv: IntVar, store: LiteralStore) -> tuple[int, int]:
    """Bounds from leading resolved-true and trailing resolved-false bits."""
    bits = [store.resolve(b) for b in iv.bits]
    lead = 0
    while lead < len(bits) and bits[lead] == TRUE:
        lead += 1
    trail = 0
    while trail < len(bits) - lead and bits[len(bits) - 1 - trail] == FALSE:
        trail += 1
    return iv.lo + lead, iv.hi - trail


def domain(iv: IntVar, store: LiteralStore) -> list[int]:
    """Values not excluded by constants or equated neighbouring bits."""
    bits = [store.resolve(b) for b in iv.bits]
    n = len(bits)
    out = []
    for k in range(n + 1):
        below = TRUE if k == 0 else bits[k - 1]
        above = FALSE if k == n else bits[k]
        if below == FALSE or above == TRUE or below == above:
            continue
        out.append(iv.lo + k)
    return out


@dataclass(frozen=True)
class DirectRep:
    """One-hot dual of an integer: ``dbits[j]`` means ``value == base + j``."""

    base: int
    dbits: tuple[int, ...]

    def d(self, v: int) -> int:
        j = v - self.base
        if 0 <= j < len(self.dbits):
            return self.dbits[j]
        return FALSE

    @property
    def values(self) -> range:
        return range(self.base, self.base + len(self.dbits))


@dataclass
class Constraint:
    """Internal constraint.

    ``args`` holds only literals, IntVars, DirectReps and tuples of those;
    numeric parameters (bounds, parity, flags) live in ``opts``.
    """

    tag: str
    args: tuple
    opts: dict = field(default_factory=dict)
    line: int | None = None

    def literals(self) -> Iterator[int]:
        yield from _literals(self.args)

    def size(self) -> int:
        return sum(1 for _ in self.literals())

    def __repr__(self) -> str:
        opts = f", {self.opts}" if self.opts else ""
        return f"{self.tag}{self.args!r}{opts}"


def _literals(obj) -> Iterator[int]:
    if isinstance(obj, int):
        yield obj
    elif isinstance(obj, IntVar):
        yield from obj.bits
    elif isinstance(obj, DirectRep):
        yield from obj.dbits
    else:
        for x in obj:
            yield from _literals(x)


@dataclass
class Decl:
    name: str
    kind: str  # "bool" or "int"
    rep: object  # literal for bools, IntVar for ints
    line: int | None = None


class Model:
    """Declarations, constraints (keyed by insertion id) and the literal store."""

    def __init__(self) -> None:
        self.store = LiteralStore()
        self.decls: dict[str, Decl] = {}
        self.constraints: dict[int, Constraint] = {}
        self.direct: dict[tuple, DirectRep] = {}
        self._next_id = 0

    @property
    def unsat(self) -> bool:
        return self.store.inconsistent

    def add(self, c: Constraint) -> int:
        cid = self._next_id
        self._next_id += 1
        self.constraints[cid] = c
        return cid

    def extend(self, cs: Iterable[Constraint]) -> list[int]:
        return [self.add(c) for c in cs]

    def new_bool(self) -> int:
        return self.store.new_var()

    def new_int(self, lo: int, hi: int, line: int | None = None) -> IntVar:
        """Fresh order-encoded integer over [lo, hi] with its ordered constraint."""
        if lo > hi:
            raise CompileError(f"empty domain [{lo}, {hi}]", line)
        bits = tuple(self.store.new_vars(hi - lo))
        if len(bits) > 1:
            self.add(Constraint("ordered", (bits,), line=line))
        return IntVar(lo, bits)

    def remove(self, cid: int) -> None:
        self.constraints.pop(cid, None)

    def live(self) -> list[Constraint]:
        return list(self.constraints.values())


@dataclass
class Substitution:
    """A list of literal equations; applying it means unifying each pair."""

    pairs: list[tuple[int, int]] = field(default_factory=list)

    def apply(self, store: LiteralStore) -> None:
        for a, b in self.pairs:
            store.union(a, b)
