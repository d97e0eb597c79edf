"""Phase one: turn declarations into bit vectors and statements into internal
constraints over literals and order-encoded integers."""
from __future__ import annotations

from .core import FALSE, TRUE, CompileError, Constraint, Decl, DirectRep, IntVar, Model
from .parser import ListTerm, Num, SourceModel, Statement


def blast_int(model: Model, name: str, lo: int, hi: int, line: int | None = None) -> IntVar:
    """Declare ``name`` over [lo, hi]: hi-lo fresh bits plus an ordered constraint."""
    iv = model.new_int(lo, hi, line)
    model.decls[name] = Decl(name, "int", iv, line)
    return iv


def blast_bool(model: Model, name: str, line: int | None = None) -> int:
    x = model.new_bool()
    model.decls[name] = Decl(name, "bool", x, line)
    return x


def blast_direct(model: Model, iv: IntVar) -> DirectRep:
    """Direct-encoding dual of ``iv``, channelled to its order bits.

    Created once per integer representation; later calls return the same rep.
    """
    key = (iv.lo, iv.bits)
    rep = model.direct.get(key)
    if rep is not None:
        return rep
    if iv.is_const():
        rep = DirectRep(iv.lo, (TRUE,))
    else:
        rep = DirectRep(iv.lo, tuple(model.store.new_vars(iv.size + 1)))
        model.add(Constraint("channel", (iv, rep)))
    model.direct[key] = rep
    return rep


def _pad(xs: tuple, ys: tuple) -> tuple[tuple, tuple]:
    n = max(len(xs), len(ys))
    return xs + (FALSE,) * (n - len(xs)), ys + (FALSE,) * (n - len(ys))


def int_rel(rel: str, a: IntVar, b: IntVar, line=None) -> Constraint:
    """Normalise a relation to int_leq / int_eq / int_neq."""
    if rel == "leq":
        return Constraint("int_leq", (a, b), line=line)
    if rel == "geq":
        return Constraint("int_leq", (b, a), line=line)
    if rel == "lt":
        return Constraint("int_leq", (a.shift(1), b), line=line)
    if rel == "gt":
        return Constraint("int_leq", (b.shift(1), a), line=line)
    if rel == "eq":
        return Constraint("int_eq", (a, b), line=line)
    if rel == "neq":
        return Constraint("int_neq", (a, b), line=line)
    raise ValueError(rel)


def int_rel_reif(rel: str, a: IntVar, b: IntVar, r: int, line=None) -> Constraint:
    if rel == "leq":
        return Constraint("int_leq_reif", (a, b, r), line=line)
    if rel == "geq":
        return Constraint("int_leq_reif", (b, a, r), line=line)
    if rel == "lt":
        return Constraint("int_leq_reif", (a.shift(1), b, r), line=line)
    if rel == "gt":
        return Constraint("int_leq_reif", (b.shift(1), a, r), line=line)
    if rel == "eq":
        return Constraint("int_eq_reif", (a, b, r), line=line)
    if rel == "neq":
        return Constraint("int_eq_reif", (a, b, -r), line=line)
    raise ValueError(rel)


def bool_array(op: str, xs: tuple, line=None) -> list[Constraint]:
    if op == "or":
        return [Constraint("or", (xs,), line=line)]
    if op == "and":
        return [Constraint("or", ((x,),), line=line) for x in xs]
    if op == "xor":
        return [Constraint("xor", (xs,), {"parity": 1}, line=line)]
    if op == "iff":
        # a left-nested iff chain over n literals is true iff their xor equals n mod 2
        return [Constraint("xor", (xs,), {"parity": len(xs) % 2}, line=line)]
    raise ValueError(op)


def bool_array_reif(op: str, xs: tuple, r: int, line=None) -> Constraint:
    if op == "or":
        return Constraint("or_reif", (xs, r), line=line)
    if op == "and":
        return Constraint("or_reif", (tuple(-x for x in xs), -r), line=line)
    if op == "xor":
        return Constraint("xor", (xs + (r,),), {"parity": 0}, line=line)
    if op == "iff":
        return Constraint("xor", (xs + (r,),), {"parity": (len(xs) - 1) % 2}, line=line)
    raise ValueError(op)


def sum_rel(model: Model, rel: str, xs: tuple, bound: IntVar, line=None) -> list[Constraint]:
    """Cardinality: constant bounds become ``card`` (leq/eq), others a sum network."""
    n = len(xs)
    if bound.is_const() and rel != "neq":
        k = bound.lo
        neg = tuple(-x for x in xs)
        lits, k, eq = {
            "leq": (xs, k, False),
            "lt": (xs, k - 1, False),
            "eq": (xs, k, True),
            "geq": (neg, n - k, False),
            "gt": (neg, n - k - 1, False),
        }[rel]
        return [Constraint("card", (lits,), {"k": k, "eq": eq}, line=line)]
    total = model.new_int(0, n, line)
    units = tuple(IntVar(0, (x,)) for x in xs)
    return [Constraint("int_array_plus", (units, total), line=line), int_rel(rel, total, bound, line)]


class _Translator:
    def __init__(self, model: Model):
        self.model = model

    def lit(self, t) -> int:
        if isinstance(t, Num):
            return TRUE if t.value == 1 else FALSE
        d = self.model.decls[t.ident]
        return -d.rep if t.negated else d.rep

    def lits(self, t: ListTerm) -> tuple:
        return tuple(self.lit(x) for x in t.items)

    def ivar(self, t) -> IntVar:
        if isinstance(t, Num):
            return IntVar.const(t.value)
        iv = self.model.decls[t.ident].rep
        return iv.negated() if t.negated else iv

    def ivars(self, t: ListTerm) -> tuple:
        return tuple(self.ivar(x) for x in t.items)

    def statement(self, s: Statement) -> list[Constraint]:
        m = self.model
        name, a, line = s.name, s.args, s.line
        if name == "new_bool":
            blast_bool(m, a[0].ident, line)
            return []
        if name == "new_int":
            blast_int(m, a[0].ident, a[1].value, a[2].value, line)
            return []
        if name == "ordered":
            return [Constraint("ordered", (self.lits(a[0]),), line=line)]
        if name == "bool_eq":
            return [Constraint("bool_eq", (self.lit(a[0]), self.lit(a[1])), line=line)]
        if name == "bool_array_lex":
            return [Constraint("lex", _pad(self.lits(a[0]), self.lits(a[1])), line=line)]
        if name == "comparator":
            return [Constraint("comparator", tuple(self.lit(x) for x in a), line=line)]
        if name == "allDiff":
            members = tuple((iv, blast_direct(m, iv)) for iv in self.ivars(a[0]))
            return [Constraint("alldiff", (members,), {"starred": False}, line=line)]
        parts = name.split("_")
        if name.startswith("bool_array_sum_"):
            return sum_rel(m, parts[3], self.lits(a[0]), self.ivar(a[1]), line)
        if name.startswith("bool_array_"):
            op = parts[2]
            if name.endswith("_reif"):
                return [bool_array_reif(op, self.lits(a[0]), self.lit(a[1]), line)]
            return bool_array(op, self.lits(a[0]), line)
        if name.startswith("bool_") and name.endswith("_reif"):
            return [bool_array_reif(parts[1], (self.lit(a[0]), self.lit(a[1])), self.lit(a[2]), line)]
        if name.startswith("int_array_"):
            op = parts[2]
            return [Constraint(f"int_array_{op}", (self.ivars(a[0]), self.ivar(a[1])), line=line)]
        if name.startswith("int_"):
            op = parts[1]
            if name.endswith("_reif"):
                return [int_rel_reif(op, self.ivar(a[0]), self.ivar(a[1]), self.lit(a[2]), line)]
            x, y = self.ivar(a[0]), self.ivar(a[1])
            if len(a) == 2:
                return [int_rel(op, x, y, line)]
            z = self.ivar(a[2])
            if op in ("div", "mod") and isinstance(a[1], Num) and a[1].value == 0:
                raise CompileError(f"{name}: division by zero", line)
            if op in ("max", "min"):
                return [Constraint(f"int_array_{op}", ((x, y), z), line=line)]
            return [Constraint(f"int_{op}", (x, y, z), line=line)]
        raise CompileError(f"unsupported statement {name}", line)


def build_model(source: SourceModel) -> Model:
    """Bit-blast a parsed model into a Model of internal constraints."""
    model = Model()
    tr = _Translator(model)
    for s in source.statements:
        for c in tr.statement(s):
            model.add(c)
    return model
