"""Text format for constraint models.

One statement per line, written as Prolog-like terms::

    % comment
    new_int(a, 1, 8)
    new_bool(x)
    int_plus(a, b, 14)
    bool_array_or([x, -y, 1])
    solve satisfy

A statement may continue on following lines while brackets are open.  In
literal positions ``1`` is true and ``0``/``-1`` are false; ``-x`` negates a
Boolean or an integer variable.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int = 1):
        self.line = line
        self.col = col
        self.message = message
        super().__init__(f"line {line}, col {col}: {message}")

    def __reduce__(self):
        return (type(self), (self.message, self.line, self.col))


@dataclass(frozen=True)
class Name:
    ident: str
    negated: bool = False
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return ("-" if self.negated else "") + self.ident


@dataclass(frozen=True)
class Num:
    value: int
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class ListTerm:
    items: tuple
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return "[" + ",".join(str(t) for t in self.items) + "]"


Term = Union[Name, Num, ListTerm]


@dataclass(frozen=True)
class Statement:
    name: str
    args: tuple
    line: int
    col: int = 1

    def __str__(self) -> str:
        return f"{self.name}(" + ",".join(str(a) for a in self.args) + ")"


@dataclass
class SourceModel:
    statements: list[Statement] = field(default_factory=list)

    def declarations(self) -> list[Statement]:
        return [s for s in self.statements if s.name in ("new_bool", "new_int")]


# Argument kinds: L literal, LS literal list, I int term, IS int term list,
# C integer constant, N fresh name.
_BOOL_OPS = ("or", "and", "xor", "iff")
_RELS = ("leq", "geq", "eq", "lt", "gt", "neq")

SIGNATURES: dict[str, tuple[str, ...]] = {
    "new_bool": ("N",),
    "new_int": ("N", "C", "C"),
    "ordered": ("LS",),
    "bool_eq": ("L", "L"),
    "bool_array_lex": ("LS", "LS"),
    "allDiff": ("IS",),
    "comparator": ("L", "L", "L", "L"),
}
for _op in _BOOL_OPS:
    SIGNATURES[f"bool_array_{_op}"] = ("LS",)
    SIGNATURES[f"bool_array_{_op}_reif"] = ("LS", "L")
    SIGNATURES[f"bool_{_op}_reif"] = ("L", "L", "L")
for _rel in _RELS:
    SIGNATURES[f"int_{_rel}"] = ("I", "I")
    SIGNATURES[f"int_{_rel}_reif"] = ("I", "I", "L")
    SIGNATURES[f"bool_array_sum_{_rel}"] = ("LS", "I")
for _op in ("plus", "times", "div", "mod", "max", "min"):
    SIGNATURES[f"int_{_op}"] = ("I", "I", "I")
for _op in ("plus", "max", "min"):
    SIGNATURES[f"int_array_{_op}"] = ("IS", "I")

_TOKEN = re.compile(r"\s*(?:(?P<num>-?\d+)|(?P<name>-?[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[()\[\],]))")


class _Lexer:
    def __init__(self, text: str, locate):
        self.text = text
        self.pos = 0
        self.locate = locate

    def where(self, pos: int | None = None) -> tuple[int, int]:
        return self.locate(self.pos if pos is None else pos)

    def error(self, message: str, pos: int | None = None) -> ParseError:
        return ParseError(message, *self.where(pos))

    def peek(self):
        m = _TOKEN.match(self.text, self.pos)
        if not m or m.end() == m.start():
            return None
        return m

    def next(self):
        m = self.peek()
        if m is None:
            rest = self.text[self.pos:].lstrip()
            if rest:
                start = len(self.text) - len(rest)
                raise self.error(f"unexpected character {rest[0]!r}", start)
            raise self.error("unexpected end of statement")
        self.pos = m.end()
        return m

    def expect(self, ch: str):
        m = self.next()
        if m.group("punct") != ch:
            raise self.error(f"expected {ch!r}, found {m.group().strip()!r}", m.start(m.lastindex))
        return m

    def at_end(self) -> bool:
        return self.text[self.pos:].strip() == ""


def _parse_term(lx: _Lexer) -> Term:
    m = lx.next()
    line, col = lx.where(m.start(m.lastindex))
    if m.group("num") is not None:
        return Num(int(m.group("num")), line, col)
    if m.group("name") is not None:
        s = m.group("name")
        if s.startswith("-"):
            return Name(s[1:], True, line, col)
        return Name(s, False, line, col)
    if m.group("punct") == "[":
        items = []
        nxt = lx.peek()
        if nxt is not None and nxt.group("punct") == "]":
            lx.next()
            return ListTerm((), line, col)
        while True:
            items.append(_parse_term(lx))
            sep = lx.next()
            p = sep.group("punct")
            if p == "]":
                return ListTerm(tuple(items), line, col)
            if p != ",":
                raise lx.error(f"expected ',' or ']', found {sep.group().strip()!r}", sep.start(sep.lastindex))
    raise ParseError(f"unexpected {m.group().strip()!r}", line, col)


def _parse_statement(text: str, locate) -> Statement:
    lx = _Lexer(text, locate)
    m = lx.next()
    name = m.group("name")
    line, col = lx.where(m.start(m.lastindex))
    if name is None or name.startswith("-"):
        raise ParseError(f"expected a constraint name, found {m.group().strip()!r}", line, col)
    lx.expect("(")
    args = []
    nxt = lx.peek()
    if nxt is not None and nxt.group("punct") == ")":
        lx.next()
    else:
        while True:
            args.append(_parse_term(lx))
            sep = lx.next()
            p = sep.group("punct")
            if p == ")":
                break
            if p != ",":
                raise lx.error(f"expected ',' or ')', found {sep.group().strip()!r}", sep.start(sep.lastindex))
    if not lx.at_end():
        raise lx.error("trailing characters after statement")
    return Statement(name, tuple(args), line, col)


def _logical_lines(text: str):
    """Yield (text, locate) per statement, joining bracket-continued lines.

    ``locate`` maps an offset in the joined text back to (line, col).
    """
    buf = ""
    segments: list[tuple[int, int, int]] = []  # (offset in buf, line, col of first char)

    def make_locate(segs):
        def locate(pos: int) -> tuple[int, int]:
            off, line, col = segs[0]
            for s in segs:
                if s[0] <= pos:
                    off, line, col = s
            return line, col + pos - off
        return locate

    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("%", 1)[0].rstrip()
        if body.endswith("."):
            body = body[:-1]
        stripped = body.strip()
        if not stripped:
            continue
        lead = len(body) - len(body.lstrip())
        if buf:
            buf += " "
        segments.append((len(buf), lineno, lead + 1))
        buf += stripped
        depth = buf.count("(") + buf.count("[") - buf.count(")") - buf.count("]")
        if depth <= 0:
            yield buf, make_locate(segments)
            buf, segments = "", []
    if buf:
        yield buf, make_locate(segments)


def _check_kind(stmt: Statement, kind: str, term: Term, declared: dict[str, str]) -> None:
    def err(msg: str, t: Term):
        raise ParseError(msg, t.line or stmt.line, t.col or stmt.col)

    def check_lit(t: Term):
        if isinstance(t, Num):
            if t.value not in (0, 1, -1):
                err(f"{stmt.name}: {t.value} is not a Boolean constant", t)
        elif isinstance(t, Name):
            k = declared.get(t.ident)
            if k is None:
                err(f"{t.ident!r} used before declaration", t)
            if k != "bool":
                err(f"{stmt.name}: {t.ident!r} is an integer where a literal is expected", t)
        else:
            err(f"{stmt.name}: expected a literal, found a list", t)

    def check_int(t: Term):
        if isinstance(t, Name):
            k = declared.get(t.ident)
            if k is None:
                err(f"{t.ident!r} used before declaration", t)
            if k != "int":
                err(f"{stmt.name}: {t.ident!r} is a Boolean where an integer is expected", t)
        elif isinstance(t, ListTerm):
            err(f"{stmt.name}: expected an integer, found a list", t)

    if kind == "L":
        check_lit(term)
    elif kind == "I":
        check_int(term)
    elif kind in ("LS", "IS"):
        if not isinstance(term, ListTerm):
            err(f"{stmt.name}: expected a list", term)
        for t in term.items:
            (check_lit if kind == "LS" else check_int)(t)
    elif kind == "C":
        if not isinstance(term, Num):
            err(f"{stmt.name}: expected an integer constant", term)
    elif kind == "N":
        if not isinstance(term, Name) or term.negated:
            err(f"{stmt.name}: expected a variable name", term)
        if term.ident in declared:
            err(f"{term.ident!r} declared twice", term)


def parse_model(text: str) -> SourceModel:
    """Parse model text, checking declaration order, arities and argument kinds."""
    model = SourceModel()
    declared: dict[str, str] = {}
    seen_solve = False
    for body, locate in _logical_lines(text):
        if re.fullmatch(r"solve\s+satisfy", body):
            seen_solve = True
            continue
        if seen_solve:
            raise ParseError("statement after 'solve satisfy'", *locate(0))
        stmt = _parse_statement(body, locate)
        line = stmt.line
        sig = SIGNATURES.get(stmt.name)
        if sig is None:
            raise ParseError(f"unknown constraint {stmt.name!r}", line, stmt.col)
        if len(stmt.args) != len(sig):
            raise ParseError(f"{stmt.name} expects {len(sig)} arguments, got {len(stmt.args)}", line, stmt.col)
        for kind, term in zip(sig, stmt.args):
            _check_kind(stmt, kind, term, declared)
        if stmt.name == "new_bool":
            declared[stmt.args[0].ident] = "bool"
        elif stmt.name == "new_int":
            lo, hi = stmt.args[1].value, stmt.args[2].value
            if lo > hi:
                raise ParseError(f"empty domain [{lo}, {hi}] for {stmt.args[0].ident!r}", line, stmt.args[1].col)
            declared[stmt.args[0].ident] = "int"
        model.statements.append(stmt)
    return model


def render_model(model: SourceModel) -> str:
    return "".join(str(s) + "\n" for s in model.statements)


def same_structure(a: SourceModel, b: SourceModel) -> bool:
    """Statement-by-statement equality ignoring source positions."""
    return [str(s) for s in a.statements] == [str(s) for s in b.statements]


class AssignmentError(ValueError):
    pass


def parse_assignment(text: str, varmap) -> dict[str, int | bool]:
    """Read ``name = value`` lines against a VarMap (or anything with ``entries``)."""
    entries = {e.name: e for e in varmap.entries}
    out: dict[str, int | bool] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(\S+)", line)
        if not m:
            raise AssignmentError(f"line {lineno}: expected 'name = value'")
        name, val = m.groups()
        e = entries.get(name)
        if e is None:
            raise AssignmentError(f"line {lineno}: unknown name {name!r}")
        if e.kind == "bool":
            low = val.lower()
            if low in ("true", "1"):
                out[name] = True
            elif low in ("false", "0", "-1"):
                out[name] = False
            else:
                raise AssignmentError(f"line {lineno}: {val!r} is not a Boolean")
        else:
            try:
                v = int(val)
            except ValueError:
                raise AssignmentError(f"line {lineno}: {val!r} is not an integer") from None
            if not e.lo <= v <= e.hi:
                raise AssignmentError(f"line {lineno}: {name} = {v} outside [{e.lo}, {e.hi}]")
            out[name] = v
    return out


def render_assignment(bindings: dict[str, int | bool]) -> str:
    lines = []
    for name, v in bindings.items():
        if isinstance(v, bool):
            v = "true" if v else "false"
        lines.append(f"{name} = {v}\n")
    return "".join(lines)
