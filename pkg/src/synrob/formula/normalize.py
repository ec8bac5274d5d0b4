"""Light algebraic clean-up applied after every mutation.

The rewrite set is deliberately small: literal folding, neutral elements,
and cancellation of a coefficient that was just applied and then undone.
Rules fire leftmost-outermost, one at a time, until nothing changes.
"""

from __future__ import annotations

import math
from typing import Optional

from .ast import (
    ZERO,
    BinOp,
    Coef,
    Expr,
    Formula,
    Func,
    Neg,
    Num,
    is_one,
    is_zero,
    negate,
    power,
)

MAX_STEPS = 10_000


def _format_number(v: float) -> Optional[str]:
    if not math.isfinite(v):
        return None
    if v == 0:
        return "0"
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    text = repr(v)
    if "e" in text or "E" in text:
        return None
    return text


def _fold(op: str, left: float, right: float) -> Optional[str]:
    try:
        if op == "+":
            v = left + right
        elif op == "-":
            v = left - right
        elif op == "*":
            v = left * right
        elif op == "/":
            if right == 0:
                return None
            v = left / right
        else:
            v = left**right
            if isinstance(v, complex):
                return None
    except (OverflowError, ZeroDivisionError):
        return None
    return _format_number(float(v))


def _same_coef(a: Expr, b: Expr) -> bool:
    return isinstance(a, Coef) and a == b


def _is_neg_of(e: Expr, q: Expr) -> bool:
    return isinstance(e, Neg) and _same_coef(e.operand, q)


def rewrite_root(e: Expr) -> Optional[Expr]:
    """Apply the first matching rule at the root of ``e``, if any."""
    if isinstance(e, Neg) and isinstance(e.operand, Num):
        return negate(e.operand)
    if not isinstance(e, BinOp):
        return None
    op, l, r = e.op, e.left, e.right
    if isinstance(l, Num) and isinstance(r, Num):
        folded = _fold(op, l.value, r.value)
        if folded is not None:
            return Num(folded)
    if op == "+":
        if is_zero(r):
            return l
        if is_zero(l):
            return r
        if _is_neg_of(l, r):
            return ZERO
        if isinstance(l, BinOp) and l.op == "-" and _same_coef(l.right, r):
            return l.left
    elif op == "-":
        if is_zero(r):
            return l
        if is_zero(l):
            return negate(r)
        if _same_coef(l, r):
            return ZERO
        if isinstance(l, BinOp) and l.op == "+" and _same_coef(l.right, r):
            return l.left
    elif op == "*":
        if is_one(r):
            return l
        if is_one(l):
            return r
        if isinstance(l, BinOp) and _same_coef(l.right, r):
            if l.op == "/":
                return l.left
            if l.op == "*":
                return BinOp("*", l.left, power(r, Num("2")))
    elif op == "/":
        if is_one(r):
            return l
        if isinstance(l, BinOp) and isinstance(r, Coef):
            if l.op == "*" and l.right == r:
                return l.left
            # only for a function term, so a*x/a stays put for the reduction rules
            if l.op == "*" and l.left == r and isinstance(l.right, Func):
                return l.right
            if l.op == "/" and l.right == r:
                return BinOp("/", l.left, power(r, Num("2")))
    return None


def _step(e: Expr) -> Optional[Expr]:
    rewritten = rewrite_root(e)
    if rewritten is not None:
        return rewritten
    if isinstance(e, BinOp):
        left = _step(e.left)
        if left is not None:
            return BinOp(e.op, left, e.right)
        right = _step(e.right)
        if right is not None:
            return BinOp(e.op, e.left, right)
    elif isinstance(e, Func):
        arg = _step(e.arg)
        if arg is not None:
            return Func(e.name, arg)
    elif isinstance(e, Neg):
        operand = _step(e.operand)
        if operand is not None:
            return Neg(operand)
    return None


def normalize_expr(e: Expr) -> Expr:
    for _ in range(MAX_STEPS):
        nxt = _step(e)
        if nxt is None:
            return e
        e = nxt
    raise RuntimeError("normalize did not reach a fixed point")


def normalize(f: Formula) -> Formula:
    """Rewrite both sides to their fixed point under the clean-up rules."""
    return Formula(normalize_expr(f.lhs), normalize_expr(f.rhs))
