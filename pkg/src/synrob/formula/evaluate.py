"""Real-valued evaluation of expressions with explicit domain errors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Union

from .ast import COEFFICIENTS, BinOp, Coef, Expr, Formula, Func, Neg, Num, Var

TAN_POLE_GUARD = 1e-12


class DomainError(ArithmeticError):
    """The expression has no finite real value at the given binding."""


@dataclass(frozen=True)
class Binding:
    """Values for the nonzero coefficients and for ``x``."""

    coefficients: Mapping[str, float] = field(default_factory=dict)
    x: float = 0.0

    def __post_init__(self) -> None:
        for name, value in self.coefficients.items():
            if name not in COEFFICIENTS:
                raise ValueError(f"unknown coefficient {name!r}")
            if value == 0:
                raise ValueError(f"coefficient {name} must be nonzero")

    def lookup(self, name: str) -> float:
        if name == "x":
            return self.x
        try:
            return self.coefficients[name]
        except KeyError:
            raise KeyError(f"binding has no value for {name!r}") from None


Env = Union[Binding, Mapping[str, float]]


def _lookup(env: Env, name: str) -> float:
    if isinstance(env, Binding):
        return env.lookup(name)
    try:
        return float(env[name])
    except KeyError:
        raise KeyError(f"binding has no value for {name!r}") from None


def _finite(v: float) -> float:
    if not math.isfinite(v):
        raise DomainError(f"non-finite intermediate value {v}")
    return v


def evaluate(e: Expr, env: Env, tan_guard: float = TAN_POLE_GUARD) -> float:
    """Evaluate ``e``; ``log`` is base 10 and ``ln`` is natural."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Coef):
        return _lookup(env, e.name)
    if isinstance(e, Var):
        return _lookup(env, "x")
    if isinstance(e, Neg):
        return -evaluate(e.operand, env, tan_guard)
    if isinstance(e, Func):
        v = evaluate(e.arg, env, tan_guard)
        if e.name == "sin":
            return math.sin(v)
        if e.name == "cos":
            return math.cos(v)
        if e.name == "tan":
            if abs(math.cos(v)) < tan_guard:
                raise DomainError(f"tan evaluated at a pole ({v})")
            return _finite(math.tan(v))
        if v <= 0:
            raise DomainError(f"{e.name} of non-positive argument {v}")
        return math.log10(v) if e.name == "log" else math.log(v)
    if isinstance(e, BinOp):
        left = evaluate(e.left, env, tan_guard)
        right = evaluate(e.right, env, tan_guard)
        if e.op == "+":
            return _finite(left + right)
        if e.op == "-":
            return _finite(left - right)
        if e.op == "*":
            return _finite(left * right)
        if e.op == "/":
            if right == 0:
                raise DomainError("division by zero")
            return _finite(left / right)
        try:
            result = left**right
        except (OverflowError, ZeroDivisionError) as exc:
            raise DomainError(str(exc)) from None
        if isinstance(result, complex):
            raise DomainError(f"{left}^{right} is not real")
        return _finite(result)
    raise TypeError(f"not an expression: {e!r}")


def satisfies(f: Formula, env: Env, tol: float = 1e-9) -> bool:
    """True when both sides agree to a mixed relative/absolute tolerance.

    Raises :class:`DomainError` when either side is undefined, which callers
    must keep apart from a plain ``False``.
    """
    lhs = evaluate(f.lhs, env)
    rhs = evaluate(f.rhs, env)
    return abs(lhs - rhs) <= tol * max(1.0, abs(lhs), abs(rhs))
