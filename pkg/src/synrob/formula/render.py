"""Deterministic text rendering with just enough parentheses to re-parse."""

from __future__ import annotations

from .ast import BinOp, Coef, Expr, Formula, Func, Neg, Num, Var

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PREC = 3
_ATOM_PREC = 5


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg) or (isinstance(e, Num) and e.negative):
        return _NEG_PREC
    return _ATOM_PREC


def _wrap(s: str) -> str:
    return f"({s})"


def render_expr(e: Expr) -> str:
    if isinstance(e, Num):
        return e.text
    if isinstance(e, Coef):
        return e.name
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Func):
        return f"{e.name}({render_expr(e.arg)})"
    if isinstance(e, Neg):
        inner = render_expr(e.operand)
        # a digit right after the sign would be read back as a negative literal
        if _prec(e.operand) < _NEG_PREC or inner[0].isdigit():
            inner = _wrap(inner)
        return "-" + inner
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        left = render_expr(e.left)
        if _prec(e.left) < p:
            left = _wrap(left)
        right = render_expr(e.right)
        if _prec(e.right) <= p or right.startswith("-"):
            right = _wrap(right)
        if e.op in "+-":
            return f"{left} {e.op} {right}"
        return f"{left}{e.op}{right}"
    raise TypeError(f"not an expression: {e!r}")


def render(f: Formula) -> str:
    return f"{render_expr(f.lhs)} = {render_expr(f.rhs)}"
