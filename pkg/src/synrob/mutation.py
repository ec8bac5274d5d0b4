"""Semantics-preserving mutants of the canonical equations.

A mutant is the base equation after a chain of whole-equation rewrites:
swap sides, or divide/multiply/add/subtract an existing coefficient on both
sides.  Each step is followed by :func:`~synrob.formula.normalize`, and a
step is rejected when it lands back on any formula already seen along its
own chain, so no two steps of a chain undo each other.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .formula import (
    BinOp,
    Coef,
    EquationFamily,
    Formula,
    coefficients,
    get_family,
    normalize,
    parse,
    render,
    term_count,
)
from .seeding import make_rng

log = logging.getLogger(__name__)

RETRY_FACTOR = 50


class Kind(str, Enum):
    SWAP = "SwapSides"
    DIV = "DivideBy"
    MUL = "MultiplyBy"
    ADD = "Add"
    SUB = "Subtract"


_OP = {Kind.DIV: "/", Kind.MUL: "*", Kind.ADD: "+", Kind.SUB: "-"}


class OperandError(ValueError):
    """The rule's coefficient does not occur in the formula."""


class ExhaustionError(RuntimeError):
    def __init__(self, family: str, distance: int, achieved: int, wanted: int) -> None:
        super().__init__(
            f"{family}: found only {achieved} of {wanted} unique mutants at distance {distance}"
        )
        self.family = family
        self.distance = distance
        self.achieved = achieved
        self.wanted = wanted


@dataclass(frozen=True)
class MutationRule:
    kind: Kind
    operand: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", Kind(self.kind))
        if (self.kind is Kind.SWAP) != (self.operand is None):
            raise ValueError(f"{self.kind.value} {'takes no' if self.kind is Kind.SWAP else 'needs an'} operand")

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "operand": self.operand}

    @classmethod
    def from_json(cls, data: dict) -> "MutationRule":
        return cls(Kind(data["kind"]), data.get("operand"))

    def __str__(self) -> str:
        return self.kind.value if self.operand is None else f"{self.kind.value} {self.operand}"


SWAP = MutationRule(Kind.SWAP)


def rules_for(family: EquationFamily) -> list[MutationRule]:
    """Every rule applicable to a formula of ``family``, in a fixed order."""
    rules = [SWAP]
    for kind in (Kind.DIV, Kind.MUL, Kind.ADD, Kind.SUB):
        rules.extend(MutationRule(kind, q) for q in family.coefficients)
    return rules


def apply_rule(f: Formula, rule: MutationRule) -> Formula:
    if rule.kind is Kind.SWAP:
        return f.swapped()
    if rule.operand not in coefficients(f):
        raise OperandError(f"coefficient {rule.operand!r} does not occur in {render(f)!r}")
    q = Coef(rule.operand)
    op = _OP[rule.kind]
    return normalize(Formula(BinOp(op, f.lhs, q), BinOp(op, f.rhs, q)))


@dataclass(frozen=True)
class MutantRecord:
    family: str
    chain: tuple[MutationRule, ...]
    formula: Formula
    # base formula plus every intermediate formula of the chain
    lineage: tuple[Formula, ...] = field(repr=False, compare=False)
    id: str = ""

    @property
    def distance(self) -> int:
        return len(self.chain)

    @property
    def rendered(self) -> str:
        return render(self.formula)

    @property
    def size(self) -> int:
        return term_count(self.formula)

    @property
    def base_formula(self) -> Formula:
        return self.lineage[0] if self.lineage else self.formula

    @property
    def kinds(self) -> tuple[str, ...]:
        """Distinct mutation kinds in the chain, in first-use order."""
        return tuple(dict.fromkeys(r.kind.value for r in self.chain))

    def with_id(self, id: str) -> "MutantRecord":
        return MutantRecord(self.family, self.chain, self.formula, self.lineage, id)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "family": self.family,
            "distance": self.distance,
            "chain": [r.to_json() for r in self.chain],
            "formula": self.rendered,
            "size": self.size,
            "base_formula": render(self.base_formula),
        }


def base_record(family: str | EquationFamily) -> MutantRecord:
    fam = get_family(family)
    return MutantRecord(fam.id, (), fam.formula, (), f"{fam.id}-d0-000")


def extend_chain(record: MutantRecord, rule: MutationRule) -> Optional[MutantRecord]:
    """Extend ``record`` by one rule, or return ``None`` if the step cancels.

    A step cancels when the normalized result equals the base formula or any
    formula produced earlier in the chain (the current one included).
    """
    fam = get_family(record.family)
    if rule.operand is not None and rule.operand not in fam.coefficients:
        raise OperandError(f"{rule.operand!r} is not a coefficient of {fam.id}")
    try:
        result = apply_rule(record.formula, rule)
    except OperandError:
        return None
    lineage = record.lineage + (record.formula,)
    if result in lineage:
        return None
    before, after = term_count(record.formula), term_count(result)
    if after < before:
        log.debug("%s: %s shrinks %r (%d -> %d terminals)", fam.id, rule, render(result), before, after)
    return MutantRecord(fam.id, record.chain + (rule,), result, lineage)


def _extensions(record: MutantRecord, rules: Sequence[MutationRule]) -> list[MutantRecord]:
    out = []
    for rule in rules:
        ext = extend_chain(record, rule)
        if ext is not None:
            out.append(ext)
    return out


def _assign_ids(records: Iterable[MutantRecord], family: str, distance: int) -> list[MutantRecord]:
    return [r.with_id(f"{family}-d{distance}-{i:03d}") for i, r in enumerate(records)]


def enumerate_distance1(family: str | EquationFamily) -> list[MutantRecord]:
    """All accepted single-rule mutants, deduplicated by structure."""
    fam = get_family(family)
    base = base_record(fam)
    seen = {base.formula}
    out = []
    for ext in _extensions(base, rules_for(fam)):
        if ext.formula not in seen:
            seen.add(ext.formula)
            out.append(ext)
    return _assign_ids(out, fam.id, 1)


def sample_family(
    family: str | EquationFamily,
    per_distance: int = 20,
    max_distance: int = 5,
    rng: random.Random | None = None,
) -> list[MutantRecord]:
    """Mutants of one family, ``per_distance`` unique ones per distance.

    Distance 1 is the full enumeration, subsampled only when it holds more
    than ``per_distance`` mutants.  Each deeper mutant extends a uniformly
    drawn mutant of the previous distance by a uniformly drawn accepted
    rule; a formula is kept only the first time it appears in the family.
    """
    if per_distance < 1:
        raise ValueError("per_distance must be at least 1")
    fam = get_family(family)
    rng = rng if rng is not None else make_rng(0, fam.id)
    rules = rules_for(fam)

    level = enumerate_distance1(fam)
    if len(level) > per_distance:
        keep = sorted(rng.sample(range(len(level)), per_distance))
        level = _assign_ids([level[i] for i in keep], fam.id, 1)
    out = list(level) if max_distance >= 1 else []
    seen = {fam.formula} | {r.formula for r in level}

    for distance in range(2, max_distance + 1):
        found: list[MutantRecord] = []
        attempts = 0
        budget = RETRY_FACTOR * per_distance
        while len(found) < per_distance and attempts < budget:
            attempts += 1
            parent = rng.choice(level)
            options = _extensions(parent, rules)
            if not options:
                continue
            child = rng.choice(options)
            if child.formula in seen:
                continue
            seen.add(child.formula)
            found.append(child)
        if len(found) < per_distance:
            raise ExhaustionError(fam.id, distance, len(found), per_distance)
        level = _assign_ids(found, fam.id, distance)
        out.extend(level)
    return out


def sample_variants(
    families: Iterable[str | EquationFamily],
    per_distance: int = 20,
    max_distance: int = 5,
    seed: int = 0,
) -> list[MutantRecord]:
    """Sample every family from its own stream derived from ``seed``."""
    out: list[MutantRecord] = []
    for family in families:
        fam = get_family(family)
        out.extend(sample_family(fam, per_distance, max_distance, make_rng(seed, "mutate", fam.id)))
    return out


def replay(family: str, chain: Sequence[MutationRule]) -> MutantRecord:
    record = base_record(family)
    for rule in chain:
        nxt = extend_chain(record, rule)
        if nxt is None:
            raise ValueError(f"chain {[str(r) for r in chain]} cancels at {rule}")
        record = nxt
    return record


def dump_mutants(records: Iterable[MutantRecord], path: str | Path) -> None:
    lines = [json.dumps(r.to_json()) for r in records]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def load_mutants(path: str | Path) -> list[MutantRecord]:
    """Read a mutant file, replaying each chain to rebuild its lineage."""
    records = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        data = json.loads(line)
        chain = [MutationRule.from_json(r) for r in data["chain"]]
        record = replay(data["family"], chain).with_id(data["id"])
        if record.formula != parse(data["formula"]):
            raise ValueError(f"{path}:{lineno}: formula does not match its chain")
        records.append(record)
    return records
