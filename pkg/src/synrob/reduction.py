"""Shrinking rewrites that bring an equation to the form ``E = 0``.

After everything is moved to the left-hand side, that side is viewed as a
list of signed terms.  One reduction step then does the first of:

* cancel a coefficient term against an equal one of opposite sign,
  whatever terms lie between them;
* strike a coefficient factor shared by every term;
* strike a coefficient divisor shared by every term.

``Q^n`` counts as ``n`` copies of ``Q`` for the last two steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .formula import COEFFICIENTS, BinOp, Coef, Expr, Formula, Neg, Num, negate, normalize, split_sign
from .formula.ast import ONE, ZERO, Var, is_zero, walk

MAX_STEPS = 10_000


@dataclass(frozen=True)
class Term:
    negative: bool
    payload: Expr

    def flipped(self) -> "Term":
        return Term(not self.negative, self.payload)


def flatten(e: Expr) -> list[Term]:
    """Split ``e`` at its top-level ``+``/``-`` into signed terms.

    Signs are pulled out of unary minus, negative literals and leftmost
    product factors; zero terms are dropped.
    """
    if isinstance(e, BinOp) and e.op in "+-":
        right = flatten(e.right)
        if e.op == "-":
            right = [t.flipped() for t in right]
        return flatten(e.left) + right
    negative, payload = split_sign(e)
    if isinstance(payload, BinOp) and payload.op in "+-" or isinstance(payload, Neg):
        terms = flatten(payload)
        return [t.flipped() for t in terms] if negative else terms
    if is_zero(payload):
        return []
    return [Term(negative, payload)]


def join(terms: Iterable[Term]) -> Expr:
    out: Optional[Expr] = None
    for t in terms:
        if out is None:
            out = negate(t.payload) if t.negative else t.payload
        else:
            out = BinOp("-" if t.negative else "+", out, t.payload)
    return ZERO if out is None else out


def mentions_x(e: Expr) -> bool:
    return any(isinstance(n, Var) for n in walk(e))


def arrange(terms: list[Term]) -> list[Term]:
    """Stable reorder putting terms that mention ``x`` first."""
    return sorted(terms, key=lambda t: not mentions_x(t.payload))


def shift_lhs(f: Formula) -> Formula:
    """Move every term to the left: ``lhs - rhs = 0``, ``x`` terms leading."""
    terms = flatten(f.lhs) + [t.flipped() for t in flatten(f.rhs)]
    return Formula(join(arrange(terms)), ZERO)


# A product viewed as a left-to-right chain of (op, operand), first op "*".
Chain = list[tuple[str, Expr]]


def _chain(e: Expr) -> Chain:
    if isinstance(e, BinOp) and e.op in "*/":
        return _chain(e.left) + [(e.op, e.right)]
    return [("*", e)]


def _unchain(chain: Chain) -> Expr:
    if not chain:
        return ONE
    op, out = chain[0]
    if op == "/":
        out = BinOp("/", ONE, out)
    for op, operand in chain[1:]:
        out = BinOp(op, out, operand)
    return out


def _copies(operand: Expr, q: str) -> int:
    if operand == Coef(q):
        return 1
    if (
        isinstance(operand, BinOp)
        and operand.op == "^"
        and operand.left == Coef(q)
        and isinstance(operand.right, Num)
        and operand.right.value.is_integer()
        and operand.right.value >= 2
    ):
        return int(operand.right.value)
    return 0


def _find(chain: Chain, op: str, q: str) -> Optional[int]:
    for i in range(len(chain) - 1, -1, -1):
        if chain[i][0] == op and _copies(chain[i][1], q):
            return i
    return None


def _strike(payload: Expr, op: str, q: str) -> Expr:
    chain = _chain(payload)
    i = _find(chain, op, q)
    assert i is not None
    n = _copies(chain[i][1], q)
    if n == 1:
        del chain[i]
    else:
        rest = Coef(q) if n == 2 else BinOp("^", Coef(q), Num(str(n - 1)))
        chain[i] = (op, rest)
    return _unchain(chain)


def _cancel_pair(terms: list[Term]) -> Optional[list[Term]]:
    for i, t in enumerate(terms):
        if not isinstance(t.payload, Coef):
            continue
        for j in range(i + 1, len(terms)):
            u = terms[j]
            if u.payload == t.payload and u.negative != t.negative:
                return [v for k, v in enumerate(terms) if k not in (i, j)]
    return None


def _strike_common(terms: list[Term], op: str) -> Optional[list[Term]]:
    if not terms:
        return None
    for q in COEFFICIENTS:
        if all(_find(_chain(t.payload), op, q) is not None for t in terms):
            out: list[Term] = []
            for t in terms:
                rest = flatten(_strike(t.payload, op, q))
                out.extend(r.flipped() if t.negative else r for r in rest)
            return out
    return None


def reduce_once(f: Formula) -> Optional[Formula]:
    """One reduction step on ``E = 0``, or ``None`` if none applies."""
    if not is_zero(f.rhs):
        raise ValueError("reduce_once expects a formula with right-hand side 0")
    terms = flatten(f.lhs)
    for step in (_cancel_pair, lambda ts: _strike_common(ts, "*"), lambda ts: _strike_common(ts, "/")):
        out = step(terms)
        if out is not None:
            return Formula(join(arrange(out)), ZERO)
    return None


def reduce_fixpoint(f: Formula) -> Formula:
    """Shift to the left-hand side, then reduce until nothing changes."""
    f = shift_lhs(normalize(f))
    for _ in range(MAX_STEPS):
        nxt = reduce_once(f)
        if nxt is None:
            return f
        f = nxt
    raise RuntimeError("reduction did not terminate")
