import random

import pytest
from hypothesis import given, settings

from synrob.formula import FAMILY_IDS, equiv_evidence, get_family, parse, term_count
from synrob.mutation import base_record, extend_chain, rules_for, sample_variants
from synrob.reduction import Term, flatten, join, reduce_fixpoint, reduce_once, shift_lhs

from .strategies import pipeline_exprs

LINEAR_FORMS = {parse("a*x + b = 0"), parse("-a*x - b = 0")}


def all_mutants(family, depth):
    """Breadth-first closure of the mutation rules, one record per formula."""
    rules = rules_for(get_family(family))
    level = [base_record(family)]
    seen = {level[0].formula}
    out = []
    for _ in range(depth):
        nxt = []
        for rec in level:
            for rule in rules:
                child = extend_chain(rec, rule)
                if child is not None and child.formula not in seen:
                    seen.add(child.formula)
                    nxt.append(child)
        out.extend(nxt)
        level = nxt
    return out


class TestTermList:
    def test_flatten_signs(self):
        terms = flatten(parse("-(a*x + b) - (c - a*x) = 0").lhs)
        assert [(t.negative, render_payload(t)) for t in terms] == [
            (True, "a*x"),
            (True, "b"),
            (True, "c"),
            (False, "a*x"),
        ]

    def test_flatten_drops_zero(self):
        assert flatten(parse("a*x + 0 - 0 = 0").lhs) == flatten(parse("a*x = 0").lhs)

    @settings(max_examples=300)
    @given(pipeline_exprs)
    def test_join_flatten_is_stable(self, e):
        joined = join(flatten(e))
        assert join(flatten(joined)) == joined


def render_payload(t: Term) -> str:
    from synrob.formula import render_expr

    return render_expr(t.payload)


class TestShift:
    def test_swapped_base(self):
        assert shift_lhs(parse("0 = a*x+b")) == parse("-a*x - b = 0")

    def test_zero_rhs(self):
        assert shift_lhs(parse("a*x+b = 0")) == parse("a*x + b = 0")

    def test_literal(self):
        f = parse("a*x+a+b = a")
        shifted = shift_lhs(f)
        assert shifted == parse("a*x + a + b - a = 0")
        assert equiv_evidence("linear", shifted, 100, random.Random(0)).passed


class TestReduceOnce:
    def test_interceded_addition(self):
        assert reduce_once(parse("a*x + a + b - a = 0")) == parse("a*x + b = 0")

    def test_interceded_subtraction(self):
        assert reduce_once(parse("a*x - b + c + b = 0")) == parse("a*x + c = 0")

    def test_common_factor(self):
        assert reduce_once(parse("a*x*c + b*c = 0")) == parse("a*x + b = 0")

    def test_common_divisor(self):
        assert reduce_once(parse("a*x/c - b/c = 0")) == parse("a*x - b = 0")

    def test_power_divisor_counts_twice(self):
        assert reduce_once(parse("b/a^2 - log(x)/a = 0")) == parse("-log(x) + b/a = 0")

    def test_partial_factor_untouched(self):
        assert reduce_once(parse("a*x*c + b = 0")) is None

    def test_irreducible(self):
        assert reduce_once(parse("a*x + b = 0")) is None
        assert reduce_once(parse("-a*x - b = 0")) is None

    def test_requires_zero_rhs(self):
        with pytest.raises(ValueError):
            reduce_once(parse("a*x = b"))


class TestFixpoint:
    def test_prompt_example(self):
        assert reduce_fixpoint(parse("a*x + a + b = a")) == parse("a*x + b = 0")

    def test_already_reduced(self):
        assert reduce_fixpoint(parse("a*x + b = 0")) == parse("a*x + b = 0")

    def test_log_example(self):
        red = reduce_fixpoint(parse("b/a^2 = log(x)/a"))
        assert red.rhs == parse("0 = 0").rhs
        assert reduce_once(red) is None
        assert equiv_evidence("log10", red, 100, random.Random(4)).passed

    def test_steps_strictly_shrink(self):
        for rec in sample_variants(FAMILY_IDS):
            f = shift_lhs(rec.formula)
            while (nxt := reduce_once(f)) is not None:
                assert term_count(nxt) < term_count(f)
                f = nxt

    def test_mutants_sound_and_idempotent(self):
        for rec in sample_variants(FAMILY_IDS, seed=21):
            red = reduce_fixpoint(rec.formula)
            assert reduce_fixpoint(red) == red
            assert equiv_evidence(rec.family, red, 30, random.Random(rec.id)).passed, rec.rendered

    @pytest.mark.slow
    def test_linear_closure_exhaustive(self):
        mutants = all_mutants("linear", 5)
        assert len(mutants) > 20_000
        bad = [m.rendered for m in mutants if reduce_fixpoint(m.formula) not in LINEAR_FORMS]
        assert not bad

    def test_linear_closure_depth3(self):
        for m in all_mutants("linear", 3):
            assert reduce_fixpoint(m.formula) in LINEAR_FORMS, m.rendered
