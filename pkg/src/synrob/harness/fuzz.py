"""Differential fuzzing of a compiled program against the reference solver."""

from __future__ import annotations

import json
import math
import os
import random
import re
import selectors
import subprocess
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from ..formula import get_family
from ..seeding import make_rng
from .build import DEFAULT_COMPILER, CompiledProgram, compile_program
from .extract import extract_code
from .reference import NO_REAL_ROOTS, reference_output

EQUIVALENT = "Equivalent"
NON_EQUIVALENT = "NonEquivalent"
SUSPECT = "Suspect"

COMPILE_ERROR = "compile_error"
RUNTIME_FAILURE = "runtime_failure"
OUTPUT_UNPARSEABLE = "output_unparseable"
OUTPUT_MISMATCH = "output_mismatch"
GENERATION_FAILURE = "generation_failure"

SUSPECT_FLOOR = 0.90

# Beyond these the reference solution of a*log(x) = b or a*ln(x) = b is not
# a finite double, so such draws violate the family's domain.
_MAX_RATIO = {"log10": math.log10(1.7976931348623157e308), "ln": math.log(1.7976931348623157e308)}


@dataclass(frozen=True)
class FuzzConfig:
    inputs_per_program: int = 1000
    input_range: tuple[float, float] = (-1000.0, 1000.0)
    min_magnitude: float = 0.5
    trig_bound: bool = True
    integer_inputs: bool = False
    epsilon_2dp: float = 0.02
    epsilon_6dp: float = 0.000002
    timeout: float = 2.0
    output_cap: int = 64 * 1024
    trig_compare: str = "principal"
    seed: int = 0
    compiler: tuple[str, ...] = DEFAULT_COMPILER

    def __post_init__(self) -> None:
        if self.inputs_per_program < 1:
            raise ValueError("inputs_per_program must be at least 1")
        lo, hi = self.input_range
        if not lo < hi or max(abs(lo), abs(hi)) < self.min_magnitude:
            raise ValueError(f"input range {self.input_range} leaves nothing to sample")
        if self.trig_compare not in ("principal", "residual"):
            raise ValueError(f"trig_compare must be 'principal' or 'residual', not {self.trig_compare!r}")

    def epsilon(self, family: str) -> float:
        return self.epsilon_6dp if get_family(family).precision == 6 else self.epsilon_2dp

    def to_json(self) -> dict:
        d = asdict(self)
        d["input_range"] = list(self.input_range)
        d["compiler"] = list(self.compiler)
        return d


@dataclass(frozen=True)
class Verdict:
    outcome: str
    reason: str = ""
    rate: float = 0.0
    first_mismatch: Optional[dict] = None
    counts: dict = field(default_factory=dict)

    @classmethod
    def failed(cls, reason: str, detail: str = "") -> "Verdict":
        return cls(NON_EQUIVALENT, reason, 0.0, {"detail": detail} if detail else None)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "Verdict":
        return cls(**data)


def sample_inputs(family: str, n: int, rng: random.Random, cfg: FuzzConfig = FuzzConfig()) -> list[tuple]:
    """``n`` coefficient tuples for ``family`` satisfying its prompt's assumptions."""
    if n < 1:
        raise ValueError("n must be at least 1")
    fam = get_family(family)
    lo, hi = cfg.input_range

    def draw():
        while True:
            v = rng.randint(math.ceil(lo), math.floor(hi)) if cfg.integer_inputs else rng.uniform(lo, hi)
            if abs(v) >= cfg.min_magnitude:
                return v

    out = []
    while len(out) < n:
        coeffs = tuple(draw() for _ in fam.coefficients)
        a, b = coeffs[0], coeffs[1]
        if cfg.trig_bound and fam.bounded_ratio and abs(b) > abs(a):
            continue
        if family in _MAX_RATIO and b / a >= _MAX_RATIO[family]:
            continue
        out.append(coeffs)
    return out


_NUMBER = re.compile(
    r"(?<![\w.])[-+]?(?:(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?|inf(?:inity)?|nan)(?![\w])",
    re.I,
)


def parse_numbers(text: str, family: str):
    """Numbers printed by a program, ignoring labels around them.

    Returns ``NO_REAL_ROOTS`` when the text says so, a tuple of floats when
    their count matches the family's number of solutions, else ``None``.
    """
    if NO_REAL_ROOTS.lower() in text.lower():
        return NO_REAL_ROOTS
    values = tuple(float(m.group(0)) for m in _NUMBER.finditer(text))
    if len(values) != get_family(family).arity:
        return None
    return values


def _residual_ok(family: str, x: float, coeffs: Sequence[float], eps: float) -> bool:
    a, b = coeffs[0], coeffs[1]
    if not math.isfinite(x):
        return False
    f, df = {
        "sin": (math.sin, math.cos),
        "cos": (math.cos, lambda t: -math.sin(t)),
        "tan": (math.tan, lambda t: 1 + math.tan(t) ** 2),
    }[family]
    return abs(a * f(x) - b) <= eps * abs(a) * max(1.0, abs(df(x)))


def _close(e: float, a: float, eps: float) -> bool:
    if math.isinf(e) or math.isinf(a):
        return e == a
    return abs(e - a) <= eps


def agree(expected, actual, family: str, cfg: FuzzConfig = FuzzConfig(), coeffs: Sequence[float] = ()) -> bool:
    if expected is None or actual is None:
        return False
    if expected == NO_REAL_ROOTS or actual == NO_REAL_ROOTS:
        return expected == actual
    eps = cfg.epsilon(family)
    if len(expected) != len(actual):
        return False
    if len(expected) == 2:
        (e1, e2), (a1, a2) = expected, actual
        return (_close(e1, a1, eps) and _close(e2, a2, eps)) or (_close(e1, a2, eps) and _close(e2, a1, eps))
    if cfg.trig_compare == "residual" and family in ("sin", "cos", "tan"):
        return _residual_ok(family, actual[0], coeffs, eps)
    return _close(expected[0], actual[0], eps)


@dataclass(frozen=True)
class Execution:
    stdout: str
    returncode: int
    failure: str = ""  # timeout, signal or output_cap


def run_once(binary: str | Path, stdin_text: str, timeout: float, output_cap: int) -> Execution:
    """Run ``binary`` once, killing it on timeout or when it prints too much."""
    proc = subprocess.Popen(
        [str(binary)], stdin=subprocess.PIPE, stdout=subprocess.PIPE, stderr=subprocess.DEVNULL
    )
    deadline = time.monotonic() + timeout
    try:
        proc.stdin.write(stdin_text.encode())
        proc.stdin.close()
    except BrokenPipeError:
        pass
    chunks, size, failure = [], 0, ""
    fd = proc.stdout.fileno()
    with selectors.DefaultSelector() as sel:
        sel.register(fd, selectors.EVENT_READ)
        while True:
            left = deadline - time.monotonic()
            if left <= 0:
                failure = "timeout"
                break
            if not sel.select(left):
                continue
            chunk = os.read(fd, 65536)
            if not chunk:
                break
            chunks.append(chunk)
            size += len(chunk)
            if size > output_cap:
                failure = "output_cap"
                break
    if not failure:
        try:
            proc.wait(max(deadline - time.monotonic(), 0.01))
        except subprocess.TimeoutExpired:
            failure = "timeout"
    if failure:
        proc.kill()
    proc.stdout.close()
    rc = proc.wait()
    if not failure and rc < 0:
        failure = "signal"
    return Execution(b"".join(chunks).decode("utf-8", "replace"), rc, failure)


def _format_input(coeffs: Sequence[float]) -> str:
    return " ".join(str(v) if isinstance(v, int) else repr(float(v)) for v in coeffs) + "\n"


def fuzz_verdict(
    program: CompiledProgram,
    family: str,
    cfg: FuzzConfig = FuzzConfig(),
    inputs: Optional[Sequence[Sequence[float]]] = None,
    rng: Optional[random.Random] = None,
) -> Verdict:
    """Compare ``program`` with the reference on sampled (or given) inputs."""
    if not program.ok:
        return Verdict(NON_EQUIVALENT, COMPILE_ERROR, 0.0, {"detail": program.log[-2000:]})
    if inputs is None:
        inputs = sample_inputs(family, cfg.inputs_per_program, rng or make_rng(cfg.seed, "fuzz"), cfg)
    agreed = structural = unparseable = 0
    first = None
    for coeffs in inputs:
        expected_text = reference_output(family, coeffs)
        expected = parse_numbers(expected_text, family)
        run = run_once(program.binary_path, _format_input(coeffs), cfg.timeout, cfg.output_cap)
        actual = None
        if run.failure:
            structural += 1
        else:
            actual = parse_numbers(run.stdout, family)
            unparseable += actual is None
        if not run.failure and agree(expected, actual, family, cfg, coeffs):
            agreed += 1
        elif first is None:
            first = {
                "input": list(coeffs),
                "expected": expected_text,
                "actual": run.stdout[:500],
                "failure": run.failure,
                "returncode": run.returncode,
            }
    n = len(inputs)
    rate = agreed / n
    counts = {"inputs": n, "agreed": agreed, "structural": structural, "unparseable": unparseable}
    if rate == 1.0:
        return Verdict(EQUIVALENT, "", rate, None, counts)
    if rate >= SUSPECT_FLOOR:
        return Verdict(SUSPECT, "", rate, first, counts)
    if structural == n:
        reason = RUNTIME_FAILURE
    elif structural + unparseable == n:
        reason = OUTPUT_UNPARSEABLE
    else:
        reason = OUTPUT_MISMATCH
    return Verdict(NON_EQUIVALENT, reason, rate, first, counts)


def evaluate_response(
    response: Optional[str],
    family: str,
    workdir: str | Path,
    cfg: FuzzConfig = FuzzConfig(),
    rng: Optional[random.Random] = None,
    build_cache: str | Path | None = None,
) -> Verdict:
    """Extract, compile and fuzz one response, keeping artifacts in ``workdir``.

    ``response`` is ``None`` when generation itself failed.
    """
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    if response is None:
        verdict = Verdict.failed(GENERATION_FAILURE, "no response")
    else:
        src = extract_code(response)
        if not src.ok:
            verdict = Verdict.failed(GENERATION_FAILURE, "; ".join(src.notes))
        else:
            program = compile_program(src.source, workdir, cfg.compiler, cache_dir=build_cache)
            verdict = fuzz_verdict(program, family, cfg, rng=rng)
    tmp = workdir / "verdict.json.tmp"
    tmp.write_text(json.dumps(verdict.to_json(), sort_keys=True) + "\n")
    os.replace(tmp, workdir / "verdict.json")
    return verdict
