"""Code-generation prompts built around a rendered equation.

Every prompt is a fixed English template with a single slot for the
equation.  Preprocessing swaps the slot for the reduced equation and leaves
every other byte alone.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Iterable

from .formula import get_family, parse, render
from .mutation import MutantRecord
from .reduction import reduce_fixpoint

SLOT = "{formula}"

_TAIL_2DP = "Print only the solution for `x' up to 2 digit precision after decimal"


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    text: str
    coefficients: tuple[str, ...]

    def fill(self, formula_text: str) -> str:
        return self.text.replace(SLOT, formula_text, 1)


TEMPLATES: dict[str, PromptTemplate] = {
    t.id: t
    for t in (
        PromptTemplate(
            "P1",
            "Implement a C program that finds the solutions for `x' in {formula}, where `a' and `b' "
            "are inputs to the program. Assume that none of `a' or 'b' are 0. "
            + _TAIL_2DP
            + " (do not print anything else).",
            ("a", "b"),
        ),
        PromptTemplate(
            "P2",
            "Implement a C program that finds the solutions for `x' in {formula}, where `a', `b' and `c' "
            "are inputs to the program. Assume that none of `a', `b', or `c' are 0. "
            + _TAIL_2DP
            + " (do not print anything else). Print the solutions in comma separated form. "
            "If there are no real solutions then print `No real roots'.",
            ("a", "b", "c"),
        ),
        PromptTemplate(
            "P3",
            "Implement a C program that finds the solutions for `x' in {formula}, where `a' and `b' "
            "are inputs to the program. Assume that none of `a' or `b' are 0. Print only one of the "
            "solutions for `x' in radian format up to 6 digit precision after decimal "
            "(do not print anything else).",
            ("a", "b"),
        ),
        PromptTemplate(
            "P4",
            "Implement a C program that finds the solutions for `x' in {formula}, in base 10 (not base e), "
            "where `a' and `b' are inputs to the program. Assume that none of `a' or `b' are 0. "
            + _TAIL_2DP
            + "(do not print anything else).",
            ("a", "b"),
        ),
        PromptTemplate(
            "P5",
            "Implement a C program that finds the solutions for `x' in {formula}, in base e (not base 10), "
            "where `a' and `b' are inputs to the program. Assume that none of `a' or `b' are 0. "
            + _TAIL_2DP
            + "(do not print anything else).",
            ("a", "b"),
        ),
    )
}


@dataclass(frozen=True)
class PromptInstance:
    mutant_id: str
    family: str
    template_id: str
    formula_text: str
    prompt_text: str
    preprocessed: bool = False

    @property
    def key(self) -> str:
        """Identifier used for cache and artifact paths.

        Raw and preprocessed prompts of one mutant must not share a cache
        directory, so the preprocessed one gets a suffix.
        """
        return self.mutant_id + ("-reduced" if self.preprocessed else "")

    def to_json(self) -> dict:
        return asdict(self)


def template_for(family: str) -> PromptTemplate:
    return TEMPLATES[get_family(family).template_id]


def build_prompt(record: MutantRecord) -> PromptInstance:
    tmpl = template_for(record.family)
    text = record.rendered
    return PromptInstance(record.id, record.family, tmpl.id, text, tmpl.fill(text))


def preprocess(instance: PromptInstance) -> PromptInstance:
    """Replace the prompt's equation by its reduced form."""
    if instance.preprocessed:
        raise ValueError(f"prompt {instance.key} is already preprocessed")
    reduced = render(reduce_fixpoint(parse(instance.formula_text)))
    tmpl = TEMPLATES[instance.template_id]
    return replace(instance, formula_text=reduced, prompt_text=tmpl.fill(reduced), preprocessed=True)


def build_prompts(records: Iterable[MutantRecord], with_preprocessed: bool = False) -> list[PromptInstance]:
    """Prompts for ``records``; with ``with_preprocessed`` each raw prompt is followed by its reduced twin."""
    out = []
    for record in records:
        p = build_prompt(record)
        out.append(p)
        if with_preprocessed:
            out.append(preprocess(p))
    return out


def dump_prompts(prompts: Iterable[PromptInstance], path: str | Path) -> None:
    lines = [json.dumps(p.to_json()) for p in prompts]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def load_prompts(path: str | Path) -> list[PromptInstance]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            p = PromptInstance(**json.loads(line))
            if TEMPLATES[p.template_id].fill(p.formula_text) != p.prompt_text:
                raise ValueError(f"prompt {p.key}: text does not match its template")
            out.append(p)
    return out
