import random

import pytest

from synrob.formula import FAMILY_IDS, equiv_evidence, parse, render
from synrob.mutation import (
    SWAP,
    ExhaustionError,
    Kind,
    MutationRule,
    OperandError,
    apply_rule,
    base_record,
    dump_mutants,
    enumerate_distance1,
    extend_chain,
    load_mutants,
    rules_for,
    sample_family,
    sample_variants,
)
from synrob.formula import get_family


def rule(kind, q=None):
    return MutationRule(Kind(kind), q)


class TestApplyRule:
    def test_swap(self):
        assert apply_rule(parse("a*x+b=0"), SWAP) == parse("0 = a*x+b")

    def test_add_folds_zero(self):
        assert apply_rule(parse("a*x+b=0"), rule("Add", "a")) == parse("a*x + b + a = a")

    def test_paper_log_example(self):
        f = apply_rule(parse("a*log(x) = b"), SWAP)
        f = apply_rule(f, rule("DivideBy", "a"))
        f = apply_rule(f, rule("DivideBy", "a"))
        assert render(f) == "b/a^2 = log(x)/a"

    def test_operand_must_occur(self):
        with pytest.raises(OperandError):
            apply_rule(parse("a*x+b=0"), rule("MultiplyBy", "c"))

    def test_swap_takes_no_operand(self):
        with pytest.raises(ValueError):
            MutationRule(Kind.SWAP, "a")
        with pytest.raises(ValueError):
            MutationRule(Kind.ADD)


class TestExtendChain:
    def test_inverse_pair_rejected(self):
        r = extend_chain(base_record("linear"), rule("Add", "a"))
        assert r is not None
        assert extend_chain(r, rule("Subtract", "a")) is None

    def test_double_swap_rejected(self):
        r = extend_chain(base_record("linear"), SWAP)
        assert extend_chain(r, SWAP) is None

    def test_accepted_distance_two(self):
        base = base_record("linear")
        r1 = extend_chain(base, rule("Add", "a"))
        r2 = extend_chain(r1, rule("MultiplyBy", "b"))
        assert r2 is not None and r2.distance == 2
        assert r2.formula != base.formula and r2.formula != r1.formula
        assert r2.lineage == (base.formula, r1.formula)
        assert render(r2.formula) == "(a*x + b + a)*b = a*b"

    def test_foreign_operand(self):
        with pytest.raises(OperandError):
            extend_chain(base_record("linear"), rule("Add", "c"))


def brute_force_distance1(family):
    """Apply every rule to the base formula and keep structurally new results."""
    fam = get_family(family)
    base = fam.formula
    results = {apply_rule(base, r) for r in rules_for(fam)}
    results.discard(base)
    return results


class TestEnumerate:
    @pytest.mark.parametrize("family", FAMILY_IDS)
    def test_counts(self, family):
        expected = 13 if family == "quadratic" else 9
        records = enumerate_distance1(family)
        assert len(records) == expected
        assert {r.formula for r in records} == brute_force_distance1(family)

    def test_total(self):
        assert sum(len(enumerate_distance1(f)) for f in FAMILY_IDS) == 67

    def test_quadratic_subtract_c(self):
        forms = {r.rendered for r in enumerate_distance1("quadratic")}
        assert "a*x^2 + b*x = -c" in forms


class TestSample:
    def test_default_total(self):
        records = sample_variants(FAMILY_IDS)
        assert len(records) == 627
        for fam in FAMILY_IDS:
            per = [r for r in records if r.family == fam]
            by_d = {d: sum(1 for r in per if r.distance == d) for d in range(1, 6)}
            assert by_d == {1: 13 if fam == "quadratic" else 9, 2: 20, 3: 20, 4: 20, 5: 20}

    def test_floor(self):
        records = sample_variants(["linear"], per_distance=1, max_distance=1)
        assert len(records) == 1
        assert records[0].formula in {r.formula for r in enumerate_distance1("linear")}

    def test_deterministic(self):
        assert sample_variants(FAMILY_IDS, seed=5) == sample_variants(FAMILY_IDS, seed=5)
        assert sample_variants(FAMILY_IDS, seed=5) != sample_variants(FAMILY_IDS, seed=6)

    def test_invariants(self):
        for r in sample_variants(FAMILY_IDS, seed=3):
            assert r.distance == len(r.chain)
            assert r.formula not in r.lineage
            assert r.id == f"{r.family}-d{r.distance}-{r.id.rsplit('-', 1)[1]}"

    def test_unique_within_family(self):
        records = sample_variants(FAMILY_IDS, seed=11)
        for fam in FAMILY_IDS:
            forms = [r.formula for r in records if r.family == fam]
            assert len(forms) == len(set(forms))
            assert get_family(fam).formula not in forms

    def test_exhaustion(self):
        with pytest.raises(ExhaustionError) as exc:
            sample_family("linear", per_distance=300, max_distance=2, rng=random.Random(0))
        assert exc.value.achieved < 300

    def test_per_distance_positive(self):
        with pytest.raises(ValueError):
            sample_family("linear", per_distance=0)

    def test_soundness_sampled(self):
        for r in sample_variants(["quadratic", "tan"], per_distance=5, seed=9):
            assert equiv_evidence(r.family, r.formula, 50, random.Random(r.id)).passed, r.rendered


class TestFile:
    def test_round_trip_and_bytes(self, tmp_path):
        records = sample_variants(["linear", "sin"], per_distance=3, max_distance=3, seed=2)
        p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        dump_mutants(records, p1)
        dump_mutants(sample_variants(["linear", "sin"], per_distance=3, max_distance=3, seed=2), p2)
        assert p1.read_bytes() == p2.read_bytes()
        loaded = load_mutants(p1)
        assert [r.id for r in loaded] == [r.id for r in records]
        assert [r.formula for r in loaded] == [r.formula for r in records]
        assert [r.lineage for r in loaded] == [r.lineage for r in records]

    def test_schema(self, tmp_path):
        import json

        records = sample_variants(["linear"], per_distance=2, max_distance=2)
        dump_mutants(records, tmp_path / "m.jsonl")
        row = json.loads((tmp_path / "m.jsonl").read_text().splitlines()[-1])
        assert list(row) == ["id", "family", "distance", "chain", "formula", "size", "base_formula"]
        assert row["base_formula"] == "a*x + b = 0"
        assert all(set(step) == {"kind", "operand"} for step in row["chain"])

    def test_tampered_formula(self, tmp_path):
        records = sample_variants(["linear"], per_distance=2, max_distance=2)
        path = tmp_path / "m.jsonl"
        dump_mutants(records, path)
        path.write_text(path.read_text().replace("a*x + b", "a*x - b", 1))
        with pytest.raises(ValueError):
            load_mutants(path)
