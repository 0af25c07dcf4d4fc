"""Recursive-descent parser for polynomial expressions.

Grammar::

    expr     := term (('+' | '-') term)*
    term     := factor ('*' factor)*
    factor   := base ('^' exponent)?
    base     := NUMBER | IDENT | 'sqrt' '(' expr ')' | '(' expr ')' | '-' factor
    exponent := ['-'] INTEGER | '(' ['-'] INTEGER ['/' INTEGER] ')' | '{' ['-'] INTEGER ['/' INTEGER] '}'

NUMBER is an integer or a rational literal ``n/d``. Implicit multiplication
is rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .algebra import AlgebraError, LatticeError, Poly, PresentedAlgebra


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


@dataclass(frozen=True)
class Tok:
    kind: str  # num, ident, op, end
    text: str
    pos: int


def tokenize(text: str) -> list[Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        num, ident, op = m.groups()
        start = m.start(m.lastindex) if m.lastindex else pos
        if num is not None:
            toks.append(Tok("num", num, start))
        elif ident is not None:
            toks.append(Tok("ident", ident, start))
        elif op is not None:
            if op not in "+-*^(){}/":
                raise ParseError(f"unexpected character {op!r}", start)
            toks.append(Tok("op", op, start))
        pos = m.end()
    toks.append(Tok("end", "", len(text)))
    return toks


# AST node kinds: ("num", Fraction) ("gen", name) ("add", a, b) ("sub", a, b)
# ("mul", a, b) ("neg", a) ("pow", a, Fraction) ("sqrt", a)
Ast = tuple


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def eat(self, kind: str, text: str | None = None) -> Tok:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            want = repr(text) if text else {"num": "a number", "ident": "an identifier"}.get(kind, kind)
            got = "end of input" if t.kind == "end" else repr(t.text)
            raise ParseError(f"expected {want}, got {got}", t.pos)
        self.i += 1
        return t

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def parse(self) -> Ast:
        node = self.expr()
        if not self.at("end"):
            t = self.tok
            hint = " (implicit multiplication is not allowed)" if t.kind in ("num", "ident") or t.text == "(" else ""
            raise ParseError(f"unexpected {t.text!r}{hint}", t.pos)
        return node

    def expr(self) -> Ast:
        node = self.term()
        while self.at("op", "+") or self.at("op", "-"):
            op = self.eat("op").text
            node = ("add" if op == "+" else "sub", node, self.term())
        return node

    def term(self) -> Ast:
        node = self.factor()
        while self.at("op", "*"):
            self.eat("op")
            node = ("mul", node, self.factor())
        return node

    def factor(self) -> Ast:
        base = self.base()
        if self.at("op", "^"):
            self.eat("op")
            return ("pow", base, self.exponent())
        return base

    def base(self) -> Ast:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return ("num", Fraction(t.text))
        if t.kind == "ident":
            self.i += 1
            if t.text == "sqrt":
                self.eat("op", "(")
                inner = self.expr()
                self.eat("op", ")")
                return ("sqrt", inner)
            return ("gen", t.text, t.pos)
        if self.at("op", "("):
            self.eat("op")
            inner = self.expr()
            self.eat("op", ")")
            return inner
        if self.at("op", "-"):
            self.eat("op")
            return ("neg", self.factor())
        got = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"expected a number, identifier or '(', got {got}", t.pos)

    def exponent(self) -> Fraction:
        if self.at("op", "(") or self.at("op", "{"):
            close = ")" if self.eat("op").text == "(" else "}"
            value = self._signed_rational()
            self.eat("op", close)
            return value
        sign = -1 if self.at("op", "-") and self.eat("op") else 1
        t = self.eat("num")
        if "/" in t.text:
            raise ParseError("rational exponents must be parenthesized", t.pos)
        return sign * Fraction(int(t.text))

    def _signed_rational(self) -> Fraction:
        sign = -1 if self.at("op", "-") and self.eat("op") else 1
        t = self.eat("num")
        value = Fraction(t.text)
        if self.at("op", "/"):
            self.eat("op")
            value = value / int(self.eat("num").text)
        return sign * value


def parse_ast(text: str) -> Ast:
    return _Parser(text).parse()


def lower(node: Ast, alg: PresentedAlgebra) -> Poly:
    ring = alg.ring
    kind = node[0]
    if kind == "num":
        return ring.const(node[1])
    if kind == "gen":
        name, pos = node[1], node[2]
        if name not in ring.index:
            raise ParseError(f"unknown identifier {name!r} in algebra {alg.name}", pos)
        return ring.gen(name)
    if kind == "add":
        return lower(node[1], alg) + lower(node[2], alg)
    if kind == "sub":
        return lower(node[1], alg) - lower(node[2], alg)
    if kind == "mul":
        return lower(node[1], alg) * lower(node[2], alg)
    if kind == "neg":
        return -lower(node[1], alg)
    if kind in ("pow", "sqrt"):
        inner = lower(node[1], alg)
        e = node[2] if kind == "pow" else Fraction(1, 2)
        try:
            result = inner.power(e)
        except (LatticeError, AlgebraError) as exc:
            raise ParseError(str(exc), _first_pos(node)) from exc
        for m in result.terms:
            for i, x in enumerate(m):
                if x < 0 and not ring.generators[i].invertible:
                    raise ParseError(f"{ring.names[i]} is not invertible", _first_pos(node))
        return result
    raise AssertionError(kind)


def _first_pos(node: Ast) -> int:
    if node[0] == "gen":
        return node[2]
    for child in node[1:]:
        if isinstance(child, tuple):
            return _first_pos(child)
    return 0


def parse_expr(text: str, alg: PresentedAlgebra, normalize: bool = False) -> Poly:
    """Parse ``text`` into a polynomial of ``alg``.

    The result is canonical (like terms combined); with ``normalize`` it is
    also reduced by the algebra's rewrite rules.
    """
    p = lower(parse_ast(text), alg)
    return alg.normal_form(p) if normalize else p
