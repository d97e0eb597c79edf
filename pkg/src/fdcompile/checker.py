"""Encoding-independent semantics of the source language.

The checker walks parsed statements with plain integer/Boolean values; it
shares nothing with the bit-level pipeline and serves as the oracle for the
end-to-end tests.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Iterator

from .parser import Num, SourceModel, Statement

Env = dict[str, "int | bool"]


@dataclass
class Violation:
    statement: Statement
    message: str

    def __str__(self) -> str:
        return f"line {self.statement.line}: {self.statement} violated ({self.message})"


def _lit(t, env: Env) -> bool:
    if isinstance(t, Num):
        return t.value == 1
    v = bool(env[t.ident])
    return not v if t.negated else v


def _int(t, env: Env) -> int:
    if isinstance(t, Num):
        return t.value
    v = int(env[t.ident])
    return -v if t.negated else v


def _rel(rel: str, a: int, b: int) -> bool:
    return {
        "leq": a <= b, "geq": a >= b, "lt": a < b, "gt": a > b, "eq": a == b, "neq": a != b,
    }[rel]


def _bool_op(op: str, xs: list[bool]) -> bool:
    if op == "or":
        return any(xs)
    if op == "and":
        return all(xs)
    if op == "xor":
        return reduce(lambda a, b: a != b, xs, False)
    if op == "iff":
        return reduce(lambda a, b: a == b, xs) if xs else True
    raise ValueError(op)


def _lex_leq(xs: list[bool], ys: list[bool]) -> bool:
    n = max(len(xs), len(ys))
    xs = xs + [False] * (n - len(xs))
    ys = ys + [False] * (n - len(ys))
    return xs <= ys


def holds(s: Statement, env: Env) -> bool:
    """Truth value of one statement under complete bindings."""
    name, a = s.name, s.args
    lits = lambda t: [_lit(x, env) for x in t.items]  # noqa: E731
    ints = lambda t: [_int(x, env) for x in t.items]  # noqa: E731
    if name == "new_bool":
        return isinstance(env[a[0].ident], bool)
    if name == "new_int":
        return a[1].value <= env[a[0].ident] <= a[2].value
    if name == "ordered":
        xs = lits(a[0])
        return all(x >= y for x, y in zip(xs, xs[1:]))
    if name == "bool_eq":
        return _lit(a[0], env) == _lit(a[1], env)
    if name == "bool_array_lex":
        return _lex_leq(lits(a[0]), lits(a[1]))
    if name == "comparator":
        x1, x2, x3, x4 = (_lit(t, env) for t in a)
        return x3 == (x1 or x2) and x4 == (x1 and x2)
    if name == "allDiff":
        vs = ints(a[0])
        return len(set(vs)) == len(vs)
    parts = name.split("_")
    if name.startswith("bool_array_sum_"):
        return _rel(parts[3], sum(lits(a[0])), _int(a[1], env))
    if name.startswith("bool_array_"):
        val = _bool_op(parts[2], lits(a[0]))
        return val == _lit(a[1], env) if name.endswith("_reif") else val
    if name.startswith("bool_") and name.endswith("_reif"):
        return _bool_op(parts[1], [_lit(a[0], env), _lit(a[1], env)]) == _lit(a[2], env)
    if name.startswith("int_array_"):
        vs, target = ints(a[0]), _int(a[1], env)
        if parts[2] == "plus":
            return sum(vs) == target
        if not vs:
            return False
        return (max(vs) if parts[2] == "max" else min(vs)) == target
    if name.startswith("int_"):
        op = parts[1]
        if name.endswith("_reif"):
            return _rel(op, _int(a[0], env), _int(a[1], env)) == _lit(a[2], env)
        if len(a) == 2:
            return _rel(op, _int(a[0], env), _int(a[1], env))
        x, y, z = (_int(t, env) for t in a)
        if op == "plus":
            return x + y == z
        if op == "times":
            return x * y == z
        if op == "div":
            return y != 0 and x // y == z
        if op == "mod":
            return y != 0 and x % y == z
        if op == "max":
            return max(x, y) == z
        if op == "min":
            return min(x, y) == z
    raise ValueError(f"no semantics for {name}")


def check(model: SourceModel, env: Env) -> Violation | None:
    """First violated statement (declarations included), or None."""
    for s in model.statements:
        if s.name in ("new_bool", "new_int") and s.args[0].ident not in env:
            return Violation(s, "no binding")
        try:
            ok = holds(s, env)
        except KeyError as exc:
            return Violation(s, f"no binding for {exc.args[0]}")
        if not ok:
            return Violation(s, "constraint is false")
    return None


def solutions(model: SourceModel) -> Iterator[Env]:
    """Brute-force enumeration of all satisfying bindings."""
    decls = model.declarations()
    names = [d.args[0].ident for d in decls]
    ranges = []
    for d in decls:
        if d.name == "new_bool":
            ranges.append((False, True))
        else:
            ranges.append(range(d.args[1].value, d.args[2].value + 1))
    body = [s for s in model.statements if s.name not in ("new_bool", "new_int")]
    for values in product(*ranges):
        env = dict(zip(names, values))
        if all(holds(s, env) for s in body):
            yield env


def solution_set(model: SourceModel) -> set[tuple]:
    names = [d.args[0].ident for d in model.declarations()]
    return {tuple(env[n] for n in names) for env in solutions(model)}
