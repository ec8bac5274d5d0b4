"""Immutable expression trees for univariate equations.

Nodes are frozen dataclasses, so structural equality and hashing come for
free and trees can be shared between threads without copying.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

COEFFICIENTS = ("a", "b", "c")
FUNCTIONS = ("sin", "cos", "tan", "log", "ln")
OPERATORS = ("+", "-", "*", "/", "^")


@dataclass(frozen=True)
class Num:
    """Decimal literal; ``text`` keeps the exact spelling, sign included."""

    text: str

    @property
    def value(self) -> float:
        return float(self.text)

    @property
    def negative(self) -> bool:
        return self.text.startswith("-")


@dataclass(frozen=True)
class Coef:
    name: str

    def __post_init__(self) -> None:
        if self.name not in COEFFICIENTS:
            raise ValueError(f"unknown coefficient {self.name!r}")


@dataclass(frozen=True)
class Var:
    name: str = "x"


@dataclass(frozen=True)
class Func:
    name: str
    arg: "Expr"

    def __post_init__(self) -> None:
        if self.name not in FUNCTIONS:
            raise ValueError(f"unknown function {self.name!r}")


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"

    def __post_init__(self) -> None:
        if self.op not in OPERATORS:
            raise ValueError(f"unknown operator {self.op!r}")


@dataclass(frozen=True)
class Neg:
    """Unary minus applied to a non-literal operand."""

    operand: "Expr"


Expr = Union[Num, Coef, Var, Func, BinOp, Neg]


@dataclass(frozen=True)
class Formula:
    lhs: Expr
    rhs: Expr

    def swapped(self) -> "Formula":
        return Formula(self.rhs, self.lhs)

    def __str__(self) -> str:
        from .render import render

        return render(self)


ZERO = Num("0")
ONE = Num("1")


def add(left: Expr, right: Expr) -> BinOp:
    return BinOp("+", left, right)


def sub(left: Expr, right: Expr) -> BinOp:
    return BinOp("-", left, right)


def mul(left: Expr, right: Expr) -> BinOp:
    return BinOp("*", left, right)


def div(left: Expr, right: Expr) -> BinOp:
    return BinOp("/", left, right)


def power(left: Expr, right: Expr) -> BinOp:
    return BinOp("^", left, right)


def is_zero(e: Expr) -> bool:
    return isinstance(e, Num) and e.value == 0.0


def is_one(e: Expr) -> bool:
    return isinstance(e, Num) and e.value == 1.0


def walk(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal."""
    yield e
    if isinstance(e, BinOp):
        yield from walk(e.left)
        yield from walk(e.right)
    elif isinstance(e, Func):
        yield from walk(e.arg)
    elif isinstance(e, Neg):
        yield from walk(e.operand)


def coefficients(f: Formula | Expr) -> set[str]:
    exprs = (f.lhs, f.rhs) if isinstance(f, Formula) else (f,)
    return {n.name for e in exprs for n in walk(e) if isinstance(n, Coef)}


def negate(e: Expr) -> Expr:
    """Return an expression equal to ``-e``, pushing the sign leftwards.

    The sign lands on a literal or on the leftmost factor of a product, so
    ``negate(a*x)`` is ``(-a)*x`` which renders as ``-a*x``.
    """
    if isinstance(e, Num):
        if e.negative:
            return Num(e.text[1:])
        return e if e.value == 0.0 else Num("-" + e.text)
    if isinstance(e, Neg):
        return e.operand
    if isinstance(e, BinOp) and e.op in ("*", "/"):
        return BinOp(e.op, negate(e.left), e.right)
    return Neg(e)


def split_sign(e: Expr) -> tuple[bool, Expr]:
    """Inverse of :func:`negate`: ``(True, p)`` means ``e == -p``."""
    if isinstance(e, Num) and e.negative:
        return True, Num(e.text[1:])
    if isinstance(e, Neg):
        neg, inner = split_sign(e.operand)
        return not neg, inner
    if isinstance(e, BinOp) and e.op in ("*", "/"):
        neg, left = split_sign(e.left)
        return neg, BinOp(e.op, left, e.right)
    return False, e
