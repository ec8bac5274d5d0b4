import math
import random
import re
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from synrob.formula import (
    FAMILIES,
    BinOp,
    Binding,
    Coef,
    DomainError,
    Formula,
    FormulaLexicalError,
    FormulaSyntaxError,
    Func,
    Neg,
    Num,
    Var,
    equiv_evidence,
    evaluate,
    normalize,
    parse,
    parse_expr,
    render,
    satisfies,
    term_count,
)

from .strategies import formulas, pipeline_formulas

a, b, c, x = Coef("a"), Coef("b"), Coef("c"), Var()
ZERO = Num("0")


def count_terminals(text):
    """Independent tokenizer: numerals, names, then any single symbol."""
    return len(re.findall(r"\d+(?:\.\d+)?|[A-Za-z]+|\S", text))


class TestParse:
    def test_linear(self):
        assert parse("a*x + b = 0") == Formula(BinOp("+", BinOp("*", a, x), b), ZERO)

    def test_trig(self):
        assert parse("a*sin(x) = b") == Formula(BinOp("*", a, Func("sin", x)), b)

    @pytest.mark.parametrize("text", ["a*x + = 0", "a*x + b", "(a*x + b = 0", "a*x = b)", "= 0", "a = b = c", ""])
    def test_syntax_errors(self, text):
        with pytest.raises(FormulaSyntaxError):
            parse(text)

    @pytest.mark.parametrize("text", ["a*y = 0", "exp(x) = b", "a*x % b = 0"])
    def test_lexical_errors(self, text):
        with pytest.raises(FormulaLexicalError):
            parse(text)

    def test_precedence_and_associativity(self):
        assert parse_expr("a - b - c") == BinOp("-", BinOp("-", a, b), c)
        assert parse_expr("a/b*c") == BinOp("*", BinOp("/", a, b), c)
        assert parse_expr("a + b*x^2") == BinOp("+", a, BinOp("*", b, BinOp("^", x, Num("2"))))
        assert parse_expr("x^a^b") == BinOp("^", BinOp("^", x, a), b)
        assert parse_expr("(a + b)*c") == BinOp("*", BinOp("+", a, b), c)

    def test_unary_minus(self):
        assert parse_expr("-2*x") == BinOp("*", Num("-2"), x)
        assert parse_expr("-a*x") == BinOp("*", Neg(a), x)
        assert parse_expr("-x^2") == Neg(BinOp("^", x, Num("2")))
        assert parse_expr("a - -b") == BinOp("-", a, Neg(b))
        assert parse_expr("-2.50") == Num("-2.50")


class TestRender:
    def test_prompt_example(self):
        assert render(Formula(BinOp("+", BinOp("*", a, x), b), ZERO)) == "a*x + b = 0"

    def test_power_divisor(self):
        f = Formula(BinOp("/", b, BinOp("^", a, Num("2"))), BinOp("/", Func("log", x), a))
        assert render(f) == "b/a^2 = log(x)/a"

    def test_minimal_parentheses(self):
        assert render(parse("(a*x + b)*a = 0*a")) == "(a*x + b)*a = 0*a"
        assert render(parse("a - (b - c) = a*(b*c)")) == "a - (b - c) = a*(b*c)"
        assert render(parse("(a*x) + ((b)) = (0)")) == "a*x + b = 0"
        assert render(parse("-(a*x) = (-2)^2")) == "-(a*x) = (-2)^2"

    @settings(max_examples=400)
    @given(formulas)
    def test_round_trip(self, f):
        text = render(f)
        assert parse(text) == f
        assert render(parse(text)) == text


class TestTermCount:
    @pytest.mark.parametrize(
        "text, expected",
        [("a*x + b = 0", 7), ("a*x^2 + b*x + c = 0", 13), ("0 = 0", 3), ("-a*x - b = 0", 8), ("a*sin(x) = b", 8)],
    )
    def test_examples(self, text, expected):
        assert count_terminals(text) == expected
        assert term_count(parse(text)) == expected

    @settings(max_examples=200)
    @given(formulas)
    def test_matches_independent_tokenizer(self, f):
        assert term_count(f) == count_terminals(render(f))


class TestEvaluate:
    def test_linear(self):
        assert evaluate(parse_expr("a*x + b"), {"a": 2, "b": -4, "x": 2}) == 0

    def test_log_is_base_ten(self):
        assert evaluate(parse_expr("log(x)"), {"x": 100}) == pytest.approx(2.0)
        assert evaluate(parse_expr("ln(x)"), {"x": math.e}) == pytest.approx(1.0)

    @pytest.mark.parametrize(
        "text, env",
        [
            ("b/a", {"a": 0, "b": 1}),
            ("log(x)", {"x": 0}),
            ("ln(x)", {"x": -1}),
            ("tan(x)", {"x": math.pi / 2}),
            ("x^a", {"x": -8, "a": 0.5}),
            ("x^a", {"x": 10, "a": 400}),
        ],
    )
    def test_domain_errors(self, text, env):
        with pytest.raises(DomainError):
            evaluate(parse_expr(text), env)

    def test_binding_rejects_zero_coefficient(self):
        with pytest.raises(ValueError):
            Binding({"a": 0.0}, 1.0)


class TestSatisfies:
    def test_root(self):
        assert satisfies(parse("a*x+b=0"), {"a": 2, "b": -4, "x": 2}, 1e-9)

    def test_non_root(self):
        assert not satisfies(parse("a*x+b=0"), {"a": 2, "b": -4, "x": 3}, 1e-9)

    def test_mutant_of_prompt_example(self):
        assert satisfies(parse("a*x+a+b=a"), Binding({"a": 2, "b": -4}, 2), 1e-9)

    def test_undefined_is_not_false(self):
        with pytest.raises(DomainError):
            satisfies(parse("a/(x - 2) = b"), {"a": 1, "b": 1, "x": 2})

    @given(
        st.fractions(min_value=-50, max_value=50, max_denominator=20).filter(lambda v: v != 0),
        st.fractions(min_value=-50, max_value=50, max_denominator=20).filter(lambda v: v != 0),
    )
    def test_agrees_with_exact_arithmetic(self, av, bv):
        f = parse("(a*x + b + a)*b = a*b")
        root = -bv / av
        env = {"a": float(av), "b": float(bv), "x": float(root)}
        assert (av * root + bv + av) * bv == av * bv
        assert satisfies(f, env, 1e-9)
        off = root + Fraction(1, 2)
        assert (av * off + bv + av) * bv != av * bv
        assert not satisfies(f, {**env, "x": float(off)}, 1e-9)


class TestNormalize:
    def test_divisor_chain(self):
        assert render(normalize(parse("b/a/a = log(x)/a"))) == "b/a^2 = log(x)/a"

    def test_chain_tail_cancellation(self):
        assert normalize(parse("a*x + b + c - c = 0")) == parse("a*x + b = 0")

    def test_fixed_point(self):
        f = parse("a*x + b = 0")
        assert normalize(f) == f

    @pytest.mark.parametrize(
        "before, after",
        [
            ("a*x + 0 = 0 + b", "a*x = b"),
            ("a*x - 0 = 0 - b", "a*x = -b"),
            ("a*x*1 = 1*b/1", "a*x = b"),
            ("(a*x + b)*c/c = (a*x)/a*a", "a*x + b = a*x"),
            ("a*x*b*b = b - b", "a*x*b^2 = 0"),
            ("-b + b = 2 + 3*4", "0 = 14"),
            ("a*sin(x)/a = b", "sin(x) = b"),
            ("a*x/a = b", "a*x/a = b"),
        ],
    )
    def test_rules(self, before, after):
        assert normalize(parse(before)) == parse(after)

    @settings(max_examples=300)
    @given(formulas)
    def test_idempotent(self, f):
        once = normalize(f)
        assert normalize(once) == once

    @settings(max_examples=300)
    @given(pipeline_formulas)
    def test_never_grows(self, f):
        assert term_count(normalize(f)) <= term_count(f)

    @settings(max_examples=200)
    @given(pipeline_formulas, st.integers(0, 2**32))
    def test_preserves_value(self, f, seed):
        rng = random.Random(seed)
        env = {"a": rng.uniform(0.5, 5), "b": -rng.uniform(0.5, 5), "c": rng.uniform(0.5, 5), "x": rng.uniform(-3, 3)}
        n = normalize(f)
        for side, nside in ((f.lhs, n.lhs), (f.rhs, n.rhs)):
            try:
                want = evaluate(side, env)
            except DomainError:
                continue
            assert evaluate(nside, env) == pytest.approx(want, rel=1e-9, abs=1e-9)


class TestEquivEvidence:
    def test_equivalent_mutant(self):
        assert equiv_evidence("linear", parse("a*x+a+b=a"), 100, random.Random(1)).passed

    def test_counterexample(self):
        ev = equiv_evidence("linear", parse("a*x-b=0"), 100, random.Random(1))
        assert not ev.passed
        cx = ev.counterexample
        # direct substitution: x* = -b/a gives a*x* - b = -2b, nonzero
        assert cx.x == pytest.approx(-cx.coefficients["b"] / cx.coefficients["a"])
        assert abs(cx.coefficients["a"] * cx.x - cx.coefficients["b"]) > 0.5

    @pytest.mark.parametrize("family", sorted(FAMILIES))
    def test_identity(self, family):
        fam = FAMILIES[family]
        ev = equiv_evidence(fam, fam.formula, 200, random.Random(7))
        assert ev.passed and ev.trials == 200

    def test_foreign_symbol(self):
        with pytest.raises(ValueError):
            equiv_evidence("linear", parse("a*x + c = 0"))
