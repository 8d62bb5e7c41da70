"""Typed filter expressions evaluated at the data source.

Grammar (keywords are case-insensitive, printed upper-case)::

    expr := or
    or   := and ("OR" and)*
    and  := not ("AND" not)*
    not  := "NOT" not | prim
    prim := "(" expr ")" | field op literal | field "IN" "[" literal ("," literal)* "]"
    op   := ">" | ">=" | "<" | "<=" | "==" | "!="

Literals are numbers, double-quoted strings (JSON escapes) and ``true``/``false``.
"""
from __future__ import annotations

import functools
import json
import operator
import re
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Union

from .schema import AttrType, DataRecord, Schema, UnknownField

OPS: dict[str, Callable[[Any, Any], bool]] = {
    ">": operator.gt, ">=": operator.ge, "<": operator.lt,
    "<=": operator.le, "==": operator.eq, "!=": operator.ne,
}
ORDERING_OPS = frozenset({">", ">=", "<", "<="})
KEYWORDS = frozenset({"AND", "OR", "NOT", "IN", "TRUE", "FALSE"})


class FilterSyntaxError(ValueError):
    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        detail = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{message} at position {position}{detail}")
        self.position = position
        self.expected = expected


class FilterTypeError(TypeError):
    pass


class MissingAttribute(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"record has no attribute {self.name!r}"


@dataclass(frozen=True)
class Comparison:
    field: str
    op: str
    value: Any

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown operator {self.op!r}")


@dataclass(frozen=True)
class Membership:
    field: str
    values: tuple

    def __post_init__(self):
        if not self.values:
            raise ValueError("membership needs at least one literal")


@dataclass(frozen=True)
class Not:
    term: "FilterExpr"


@dataclass(frozen=True)
class And:
    terms: tuple

    def __post_init__(self):
        if len(self.terms) < 2:
            raise ValueError("And needs at least two terms")


@dataclass(frozen=True)
class Or:
    terms: tuple

    def __post_init__(self):
        if len(self.terms) < 2:
            raise ValueError("Or needs at least two terms")


FilterExpr = Union[Comparison, Membership, Not, And, Or]


# --- lexer -----------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>-?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<op>>=|<=|==|!=|>|<)
  | (?P<punct>[()\[\],])
  | (?P<word>[A-Za-z_][A-Za-z0-9_.]*)
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str    # number, string, op, punct, word, kw, eof
    text: str
    pos: int
    value: Any = None


def _lex(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FilterSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        s = m.group()
        if kind == "number":
            value = float(s) if any(c in s for c in ".eE") else int(s)
            toks.append(_Tok("number", s, pos, value))
        elif kind == "string":
            toks.append(_Tok("string", s, pos, json.loads(s)))
        elif kind == "word":
            up = s.upper()
            if up in KEYWORDS:
                toks.append(_Tok("kw", up, pos))
            else:
                toks.append(_Tok("word", s, pos))
        elif kind != "ws":
            toks.append(_Tok(kind, s, pos))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def _fail(self, expected: tuple[str, ...]):
        t = self.cur
        what = "end of input" if t.kind == "eof" else repr(t.text)
        raise FilterSyntaxError(f"unexpected {what}", t.pos, expected)

    def _take(self, kind: str, text: str | None = None) -> _Tok:
        t = self.cur
        if t.kind != kind or (text is not None and t.text != text):
            self._fail((text or kind,))
        self.i += 1
        return t

    def _at(self, kind: str, text: str | None = None) -> bool:
        t = self.cur
        return t.kind == kind and (text is None or t.text == text)

    def parse(self) -> FilterExpr:
        expr = self.or_()
        if not self._at("eof"):
            self._fail(("AND", "OR", "end of input"))
        return expr

    def or_(self) -> FilterExpr:
        terms = [self.and_()]
        while self._at("kw", "OR"):
            self.i += 1
            terms.append(self.and_())
        return terms[0] if len(terms) == 1 else Or(tuple(terms))

    def and_(self) -> FilterExpr:
        terms = [self.not_()]
        while self._at("kw", "AND"):
            self.i += 1
            terms.append(self.not_())
        return terms[0] if len(terms) == 1 else And(tuple(terms))

    def not_(self) -> FilterExpr:
        if self._at("kw", "NOT"):
            self.i += 1
            return Not(self.not_())
        return self.prim()

    def literal(self) -> Any:
        t = self.cur
        if t.kind in ("number", "string"):
            self.i += 1
            return t.value
        if t.kind == "kw" and t.text in ("TRUE", "FALSE"):
            self.i += 1
            return t.text == "TRUE"
        self._fail(("literal",))

    def prim(self) -> FilterExpr:
        if self._at("punct", "("):
            self.i += 1
            expr = self.or_()
            self._take("punct", ")")
            return expr
        if not self._at("word"):
            self._fail(("field", "NOT", "("))
        name = self.cur.text
        self.i += 1
        if self._at("kw", "IN"):
            self.i += 1
            self._take("punct", "[")
            values = [self.literal()]
            while self._at("punct", ","):
                self.i += 1
                values.append(self.literal())
            self._take("punct", "]")
            return Membership(name, tuple(values))
        if not self._at("op"):
            self._fail(tuple(OPS) + ("IN",))
        op = self.cur.text
        self.i += 1
        return Comparison(name, op, self.literal())


def _literal_type(value: Any) -> AttrType:
    if isinstance(value, bool):
        return AttrType.BOOLEAN
    if isinstance(value, str):
        return AttrType.STRING
    return AttrType.NUMBER


def check_types(expr: FilterExpr, schema: Schema) -> None:
    """Raise UnknownField or FilterTypeError if ``expr`` does not fit ``schema``."""
    if isinstance(expr, (And, Or)):
        for t in expr.terms:
            check_types(t, schema)
    elif isinstance(expr, Not):
        check_types(expr.term, schema)
    elif isinstance(expr, Comparison):
        ftype = schema.type_of(expr.field)
        if _literal_type(expr.value) is not ftype:
            raise FilterTypeError(f"{expr.field} is {ftype.value}, literal {expr.value!r} is not")
        if expr.op in ORDERING_OPS and ftype is not AttrType.NUMBER:
            raise FilterTypeError(f"operator {expr.op} needs a number field, {expr.field} is {ftype.value}")
    elif isinstance(expr, Membership):
        ftype = schema.type_of(expr.field)
        for v in expr.values:
            if _literal_type(v) is not ftype:
                raise FilterTypeError(f"{expr.field} is {ftype.value}, literal {v!r} is not")
    else:
        raise TypeError(f"not a filter expression: {expr!r}")


def parse_filter(text: str, schema: Schema | None = None) -> FilterExpr:
    if not text or not text.strip():
        raise FilterSyntaxError("empty filter", 0, ("field", "NOT", "("))
    expr = _Parser(text).parse()
    if schema is not None:
        check_types(expr, schema)
    return expr


def _format_literal(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    return repr(value)


def format_filter(expr: FilterExpr) -> str:
    """Canonical text; ``parse_filter(format_filter(e)) == e``."""
    if isinstance(expr, Comparison):
        return f"{expr.field} {expr.op} {_format_literal(expr.value)}"
    if isinstance(expr, Membership):
        return f"{expr.field} IN [{', '.join(_format_literal(v) for v in expr.values)}]"
    if isinstance(expr, Not):
        inner = format_filter(expr.term)
        return f"NOT ({inner})" if isinstance(expr.term, (And, Or)) else f"NOT {inner}"
    if isinstance(expr, And):
        return " AND ".join(f"({format_filter(t)})" if isinstance(t, (And, Or)) else format_filter(t)
                            for t in expr.terms)
    if isinstance(expr, Or):
        return " OR ".join(f"({format_filter(t)})" if isinstance(t, Or) else format_filter(t)
                           for t in expr.terms)
    raise TypeError(f"not a filter expression: {expr!r}")


def referenced_fields(expr: FilterExpr) -> frozenset[str]:
    if isinstance(expr, (Comparison, Membership)):
        return frozenset((expr.field,))
    if isinstance(expr, Not):
        return referenced_fields(expr.term)
    return frozenset().union(*(referenced_fields(t) for t in expr.terms))


def _build(expr: FilterExpr) -> Callable[[Mapping[str, Any]], bool]:
    if isinstance(expr, Comparison):
        f, fn, lit = expr.field, OPS[expr.op], expr.value
        return lambda a: fn(a[f], lit)
    if isinstance(expr, Membership):
        f, vals = expr.field, expr.values
        return lambda a: any(a[f] == v for v in vals)
    if isinstance(expr, Not):
        inner = _build(expr.term)
        return lambda a: not inner(a)
    parts = [_build(t) for t in expr.terms]
    if isinstance(expr, And):
        return lambda a: all(p(a) for p in parts)
    return lambda a: any(p(a) for p in parts)


@functools.lru_cache(maxsize=1024)
def compile_filter(expr: FilterExpr) -> Callable[[Mapping[str, Any]], bool]:
    """Predicate over an attribute mapping. Every referenced field must be present."""
    fields = referenced_fields(expr)
    pred = _build(expr)

    def run(attrs: Mapping[str, Any]) -> bool:
        for f in fields:
            if f not in attrs:
                raise MissingAttribute(f)
        return pred(attrs)

    return run


def eval_filter(expr: FilterExpr, record: DataRecord | Mapping[str, Any]) -> bool:
    attrs = record.attrs if isinstance(record, DataRecord) else record
    return compile_filter(expr)(attrs)


__all__ = [
    "And", "Comparison", "FilterExpr", "FilterSyntaxError", "FilterTypeError", "Membership",
    "MissingAttribute", "Not", "Or", "UnknownField", "check_types", "compile_filter",
    "eval_filter", "format_filter", "parse_filter", "referenced_fields",
]
