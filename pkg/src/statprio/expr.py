"""Feature expressions: a small propositional AST, its parser and printer.

Grammar of the textual form::

    expr   := term ('||' term)*
    term   := factor ('&&' factor)*
    factor := '!' factor | '(' expr ')' | TRUE | FALSE | identifier
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import AbstractSet, Iterable, Union

from .errors import ModelError

IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Not:
    arg: "Expr"


@dataclass(frozen=True)
class And:
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class Or:
    args: tuple["Expr", ...]


Expr = Union[Const, Var, Not, And, Or]

TRUE = Const(True)
FALSE = Const(False)


def neg(e: Expr) -> Expr:
    if isinstance(e, Const):
        return Const(not e.value)
    if isinstance(e, Not):
        return e.arg
    return Not(e)


def _flatten(kind, unit: Const, zero: Const, items: Iterable[Expr]) -> Expr:
    out: list[Expr] = []
    for item in items:
        parts = item.args if isinstance(item, kind) else (item,)
        for part in parts:
            if part == zero:
                return zero
            if part != unit and part not in out:
                out.append(part)
    if not out:
        return unit
    if len(out) == 1:
        return out[0]
    return kind(tuple(out))


def conj(*items: Expr) -> Expr:
    """Conjunction, flattened; drops TRUE and repeated conjuncts."""
    return _flatten(And, TRUE, FALSE, items)


def disj(*items: Expr) -> Expr:
    """Disjunction, flattened; drops FALSE and repeated disjuncts."""
    return _flatten(Or, FALSE, TRUE, items)


def implies(a: Expr, b: Expr) -> Expr:
    return disj(neg(a), b)


def evaluate(e: Expr, selected: AbstractSet[str]) -> bool:
    """Truth value of ``e`` when exactly the features in ``selected`` are on."""
    if isinstance(e, Var):
        return e.name in selected
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Not):
        return not evaluate(e.arg, selected)
    if isinstance(e, And):
        return all(evaluate(a, selected) for a in e.args)
    if isinstance(e, Or):
        return any(evaluate(a, selected) for a in e.args)
    raise TypeError(f"not a feature expression: {e!r}")


def variables(e: Expr) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Const):
        return frozenset()
    if isinstance(e, Not):
        return variables(e.arg)
    return frozenset().union(*(variables(a) for a in e.args))


_PREC = {Or: 1, And: 2}


def to_string(e: Expr, _parent: int = 0) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Const):
        return "TRUE" if e.value else "FALSE"
    if isinstance(e, Not):
        return "!" + to_string(e.arg, 3)
    prec = _PREC[type(e)]
    sep = " || " if isinstance(e, Or) else " && "
    text = sep.join(to_string(a, prec) for a in e.args)
    return f"({text})" if prec < _parent else text


_TOKEN = re.compile(r"\s*(?:(\|\|)|(&&)|(!)|(\()|(\))|([A-Za-z_][A-Za-z0-9_]*))")


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ModelError("SYNTAX", f"unexpected character at {pos} in {text!r}")
        tokens.append(m.group(m.lastindex))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            want = expected or "a token"
            raise ModelError("SYNTAX", f"expected {want} in {self.text!r}, got {tok!r}")
        self.pos += 1
        return tok

    def expr(self) -> Expr:
        items = [self.term()]
        while self.peek() == "||":
            self.take()
            items.append(self.term())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def term(self) -> Expr:
        items = [self.factor()]
        while self.peek() == "&&":
            self.take()
            items.append(self.factor())
        return items[0] if len(items) == 1 else And(tuple(items))

    def factor(self) -> Expr:
        tok = self.take()
        if tok == "!":
            return Not(self.factor())
        if tok == "(":
            inner = self.expr()
            self.take(")")
            return inner
        if tok == "TRUE":
            return TRUE
        if tok == "FALSE":
            return FALSE
        if IDENTIFIER.match(tok):
            return Var(tok)
        raise ModelError("SYNTAX", f"unexpected {tok!r} in {self.text!r}")


def parse_expr(text: str) -> Expr:
    """Parse the textual feature-expression syntax into an AST."""
    if not isinstance(text, str):
        raise ModelError("SYNTAX", f"feature expression must be a string, got {text!r}")
    parser = _Parser(text)
    result = parser.expr()
    if parser.peek() is not None:
        raise ModelError("SYNTAX", f"trailing input {parser.peek()!r} in {text!r}")
    return result
