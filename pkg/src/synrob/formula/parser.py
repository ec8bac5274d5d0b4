"""Tokenizer and recursive-descent parser for equation text.

Precedence, tightest first: ``^``, unary minus, ``* /``, ``+ -``.  Every
binary operator is left-associative, ``^`` included.  A minus sign written
directly in front of a numeral forms a negative literal, so ``-2*x`` holds
the literal ``-2``; in front of anything else it builds a :class:`Neg` node
over the following power-level operand (``-x^2`` means ``-(x^2)``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import COEFFICIENTS, FUNCTIONS, BinOp, Coef, Expr, Formula, Func, Neg, Num, Var


class FormulaSyntaxError(ValueError):
    """Raised for malformed equation text."""


class FormulaLexicalError(FormulaSyntaxError):
    """Raised for characters or names outside the equation alphabet."""


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "coef", "var", "func", or the operator/punctuation itself
    text: str
    pos: int


_TOKEN_RE = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        assert m is not None
        number, name, other = m.groups()
        start = m.start(m.lastindex or 0)
        if number is not None:
            tokens.append(Token("num", number, start))
        elif name is not None:
            if name in COEFFICIENTS:
                tokens.append(Token("coef", name, start))
            elif name == "x":
                tokens.append(Token("var", name, start))
            elif name in FUNCTIONS:
                tokens.append(Token("func", name, start))
            else:
                raise FormulaLexicalError(f"unknown symbol {name!r} at column {start}")
        elif other in "+-*/^=()":
            tokens.append(Token(other, other, start))
        else:
            raise FormulaLexicalError(f"unexpected character {other!r} at column {start}")
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self, offset: int = 0) -> Token | None:
        j = self.i + offset
        return self.tokens[j] if j < len(self.tokens) else None

    def accept(self, kind: str) -> Token | None:
        tok = self.peek()
        if tok is not None and tok.kind == kind:
            self.i += 1
            return tok
        return None

    def expect(self, kind: str) -> Token:
        tok = self.accept(kind)
        if tok is None:
            self.fail(f"expected {kind!r}")
        return tok

    def fail(self, msg: str):
        tok = self.peek()
        where = f"column {tok.pos} ({tok.text!r})" if tok else "end of input"
        raise FormulaSyntaxError(f"{msg} at {where} in {self.text!r}")

    def formula(self) -> Formula:
        if not self.tokens:
            raise FormulaSyntaxError("empty formula")
        lhs = self.expr()
        self.expect("=")
        rhs = self.expr()
        if self.peek() is not None:
            self.fail("unexpected token")
        return Formula(lhs, rhs)

    def expr(self) -> Expr:
        node = self.term()
        while True:
            tok = self.accept("+") or self.accept("-")
            if tok is None:
                return node
            node = BinOp(tok.kind, node, self.term())

    def term(self) -> Expr:
        node = self.unary()
        while True:
            tok = self.accept("*") or self.accept("/")
            if tok is None:
                return node
            node = BinOp(tok.kind, node, self.unary())

    def unary(self) -> Expr:
        if self.accept("-"):
            num = self.accept("num")
            if num is not None:
                return self.power_tail(Num("-" + num.text))
            return Neg(self.unary())
        return self.power_tail(self.atom())

    def power_tail(self, base: Expr) -> Expr:
        while self.accept("^"):
            base = BinOp("^", base, self.exponent())
        return base

    def exponent(self) -> Expr:
        if self.accept("-"):
            num = self.accept("num")
            if num is not None:
                return Num("-" + num.text)
            return Neg(self.exponent())
        return self.atom()

    def atom(self) -> Expr:
        tok = self.peek()
        if tok is None:
            self.fail("expected an operand")
        self.i += 1
        if tok.kind == "num":
            return Num(tok.text)
        if tok.kind == "coef":
            return Coef(tok.text)
        if tok.kind == "var":
            return Var()
        if tok.kind == "func":
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Func(tok.text, arg)
        if tok.kind == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        self.i -= 1
        self.fail("expected an operand")


def parse(text: str) -> Formula:
    """Parse ``"lhs = rhs"`` into a :class:`Formula`."""
    return _Parser(text).formula()


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    if not p.tokens:
        raise FormulaSyntaxError("empty expression")
    node = p.expr()
    if p.peek() is not None:
        p.fail("unexpected token")
    return node
