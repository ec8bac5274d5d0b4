"""The seven equation families and a sampled semantic-equivalence oracle."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Optional

from .ast import Formula, coefficients
from .evaluate import Binding, DomainError, satisfies
from .parser import parse


def _linear(c: dict[str, float]) -> list[float]:
    return [-c["b"] / c["a"]]


def _quadratic(c: dict[str, float]) -> list[float]:
    a, b, cc = c["a"], c["b"], c["c"]
    disc = b * b - 4 * a * cc
    if disc < 0:
        return []
    root = math.sqrt(disc)
    return [(-b + root) / (2 * a), (-b - root) / (2 * a)]


def _ratio_fn(fn: Callable[[float], float]) -> Callable[[dict[str, float]], list[float]]:
    def solve(c: dict[str, float]) -> list[float]:
        try:
            return [fn(c["b"] / c["a"])]
        except (ValueError, OverflowError):
            return []

    return solve


@dataclass(frozen=True)
class EquationFamily:
    """One equation category together with its prompt and output contract."""

    id: str
    text: str
    coefficients: tuple[str, ...]
    template_id: str
    precision: int
    arity: int  # 1, or 2 for "up to two" (quadratic)
    solve: Callable[[dict[str, float]], list[float]]
    bounded_ratio: bool = False  # sin/cos need |b| <= |a|

    @property
    def formula(self) -> Formula:
        return parse(self.text)

    def __repr__(self) -> str:
        return f"EquationFamily({self.id!r})"


FAMILIES: dict[str, EquationFamily] = {
    f.id: f
    for f in (
        EquationFamily("linear", "a*x + b = 0", ("a", "b"), "P1", 2, 1, _linear),
        EquationFamily("quadratic", "a*x^2 + b*x + c = 0", ("a", "b", "c"), "P2", 2, 2, _quadratic),
        EquationFamily("sin", "a*sin(x) = b", ("a", "b"), "P3", 6, 1, _ratio_fn(math.asin), True),
        EquationFamily("cos", "a*cos(x) = b", ("a", "b"), "P3", 6, 1, _ratio_fn(math.acos), True),
        EquationFamily("tan", "a*tan(x) = b", ("a", "b"), "P3", 6, 1, _ratio_fn(math.atan)),
        EquationFamily("log10", "a*log(x) = b", ("a", "b"), "P4", 2, 1, _ratio_fn(lambda t: 10.0**t)),
        EquationFamily("ln", "a*ln(x) = b", ("a", "b"), "P5", 2, 1, _ratio_fn(math.exp)),
    )
}

FAMILY_IDS = tuple(FAMILIES)


def get_family(family: str | EquationFamily) -> EquationFamily:
    if isinstance(family, EquationFamily):
        return family
    try:
        return FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown equation family {family!r}; expected one of {FAMILY_IDS}") from None


@dataclass(frozen=True)
class Evidence:
    passed: bool
    trials: int
    resamples: int
    counterexample: Optional[Binding] = None


def sample_coefficients(
    family: EquationFamily, rng: random.Random, low: float = 0.5, high: float = 10.0
) -> dict[str, float]:
    """Nonzero coefficients with magnitude in ``[low, high]`` and random sign."""
    values = {name: rng.uniform(low, high) * rng.choice((-1.0, 1.0)) for name in family.coefficients}
    return values


def equiv_evidence(
    family: str | EquationFamily,
    candidate: Formula,
    trials: int = 100,
    rng: random.Random | int | None = 0,
    tol: float = 1e-6,
    resample_cap: int | None = None,
) -> Evidence:
    """Check that every closed-form solution of ``family`` satisfies ``candidate``.

    Each trial draws fresh coefficients, solves the family's canonical
    equation for ``x`` and substitutes into ``candidate``.  Draws where the
    family has no real solution, or where the candidate is undefined, are
    redrawn up to ``resample_cap`` times in total.
    """
    fam = get_family(family)
    extra = coefficients(candidate) - set(fam.coefficients)
    if extra:
        raise ValueError(f"candidate uses coefficients {sorted(extra)} outside family {fam.id}")
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    cap = resample_cap if resample_cap is not None else 50 * trials
    done = resamples = 0
    while done < trials:
        coeffs = sample_coefficients(fam, rng)
        roots = fam.solve(coeffs)
        try:
            if not roots:
                raise DomainError("family has no real solution")
            for x in roots:
                binding = Binding(coeffs, x)
                if not satisfies(candidate, binding, tol):
                    return Evidence(False, done, resamples, binding)
        except DomainError:
            resamples += 1
            if resamples > cap:
                break
            continue
        done += 1
    return Evidence(done == trials, done, resamples)
