"""Equation syntax trees: parsing, rendering, evaluation and clean-up."""

from .ast import (
    COEFFICIENTS,
    FUNCTIONS,
    BinOp,
    Coef,
    Expr,
    Formula,
    Func,
    Neg,
    Num,
    Var,
    coefficients,
    negate,
    split_sign,
)
from .evaluate import Binding, DomainError, evaluate, satisfies
from .families import FAMILIES, FAMILY_IDS, EquationFamily, Evidence, equiv_evidence, get_family
from .normalize import normalize, normalize_expr
from .parser import FormulaLexicalError, FormulaSyntaxError, parse, parse_expr, tokenize
from .render import render, render_expr


def term_count(f: Formula) -> int:
    """Number of terminal symbols in the rendered formula.

    Each numeral, name, operator, parenthesis and the ``=`` sign counts once.
    """
    return len(tokenize(render(f)))


__all__ = [
    "COEFFICIENTS",
    "FUNCTIONS",
    "FAMILIES",
    "FAMILY_IDS",
    "BinOp",
    "Binding",
    "Coef",
    "DomainError",
    "EquationFamily",
    "Evidence",
    "Expr",
    "Formula",
    "FormulaLexicalError",
    "FormulaSyntaxError",
    "Func",
    "Neg",
    "Num",
    "Var",
    "coefficients",
    "equiv_evidence",
    "evaluate",
    "get_family",
    "negate",
    "normalize",
    "normalize_expr",
    "parse",
    "parse_expr",
    "render",
    "render_expr",
    "satisfies",
    "split_sign",
    "term_count",
    "tokenize",
]
