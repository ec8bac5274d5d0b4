"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the criterion lines are
printed straight to the terminal so they stay visible under capture.
"""

import json
import math
import shutil
import time
from collections import Counter
from pathlib import Path

import httpx
import pytest

from synrob.cli import main
from synrob.formula import FAMILY_IDS, equiv_evidence, parse, term_count
from synrob.gateway import BackendConfig, RateLimiter, RemoteBackend
from synrob.harness import (
    EQUIVALENT,
    NON_EQUIVALENT,
    REFERENCE_SOURCES,
    FuzzConfig,
    compile_program,
    fuzz_verdict,
)
from synrob.mutation import sample_variants
from synrob.pipeline import Run, RunConfig
from synrob.reduction import reduce_fixpoint
from synrob.seeding import make_rng

GOLDEN = Path(__file__).parent / "golden"

pytestmark = pytest.mark.skipif(shutil.which("gcc") is None, reason="needs gcc")


@pytest.fixture
def verdict_line(capsys):
    def emit(criterion: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")

    return emit


@pytest.fixture(scope="module")
def mutants():
    return sample_variants(FAMILY_IDS)


def _run_oracle(tmp_path: Path, families, repeats: int, inputs: int):
    cfg = RunConfig(
        out=str(tmp_path),
        families=tuple(families),
        backend=BackendConfig(kind="mock_oracle", repeats=repeats),
        fuzz=FuzzConfig(inputs_per_program=inputs),
    )
    rep, batch = Run(cfg).run_all()
    return rep, batch


def test_criterion_1_mutant_count(tmp_path, verdict_line, capsys):
    start = time.perf_counter()
    rc = main(["mutate", "--out", str(tmp_path)])
    elapsed = time.perf_counter() - start
    capsys.readouterr()
    (run_dir,) = tmp_path.iterdir()
    rows = [json.loads(line) for line in (run_dir / "mutants.jsonl").read_text().splitlines()]
    d1 = Counter(r["family"] for r in rows if r["distance"] == 1)
    per_distance = Counter((r["family"], r["distance"]) for r in rows if r["distance"] > 1)
    expected_d1 = {f: 13 if f == "quadratic" else 9 for f in FAMILY_IDS}
    ok = (
        rc == 0
        and len(rows) == 627
        and dict(d1) == expected_d1
        and sum(d1.values()) == 67
        and set(per_distance.values()) == {20}
        and len(per_distance) == 7 * 4
        and elapsed < 10
    )
    verdict_line("1", ok, f"{len(rows)} mutants, distance-1 {dict(d1)} (sum {sum(d1.values())}), {elapsed:.2f} s")
    assert ok


def test_criterion_2_mutation_soundness(mutants, verdict_line):
    start = time.perf_counter()
    failures = []
    for rec in mutants:
        ev = equiv_evidence(rec.family, rec.formula, trials=100, rng=make_rng(0, "soundness", rec.id), tol=1e-6)
        if not ev.passed or ev.trials != 100:
            failures.append(rec.id)
    elapsed = time.perf_counter() - start
    ok = not failures and len(mutants) == 627 and elapsed < 60
    verdict_line("2", ok, f"{len(mutants) - len(failures)}/{len(mutants)} mutants pass 100 trials, {elapsed:.1f} s")
    assert ok, failures[:10]


def test_criterion_3a_idempotent_and_non_increasing(mutants, verdict_line):
    start = time.perf_counter()
    not_idempotent, grew = [], []
    for rec in mutants:
        red = reduce_fixpoint(rec.formula)
        if reduce_fixpoint(red) != red:
            not_idempotent.append(rec.id)
        if term_count(red) > term_count(rec.formula):
            grew.append(f"{rec.rendered} ({term_count(rec.formula)} -> {term_count(red)})")
    elapsed = time.perf_counter() - start
    ok = not not_idempotent and not grew and elapsed < 30
    verdict_line(
        "3a",
        ok,
        f"idempotent on {len(mutants) - len(not_idempotent)}/{len(mutants)}, "
        f"size grew on {len(grew)}/{len(mutants)} (e.g. {grew[:2]}), {elapsed:.1f} s",
    )
    assert ok, grew


def test_criterion_3b_linear_forms(mutants, verdict_line):
    forms = {parse("a*x + b = 0"), parse("-a*x - b = 0")}
    linear = [m for m in mutants if m.family == "linear"]
    bad = [m.rendered for m in linear if reduce_fixpoint(m.formula) not in forms]
    ok = not bad and len(linear) == 89
    verdict_line("3b", ok, f"{len(linear) - len(bad)}/{len(linear)} linear mutants reduce to a*x + b = 0 or -a*x - b = 0")
    assert ok, bad


def test_criterion_3c_reduced_forms_sound(mutants, verdict_line):
    start = time.perf_counter()
    bad = []
    for rec in mutants:
        red = reduce_fixpoint(rec.formula)
        if not equiv_evidence(rec.family, red, trials=100, rng=make_rng(0, "reduced", rec.id), tol=1e-6).passed:
            bad.append(rec.id)
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 30
    verdict_line("3c", ok, f"{len(mutants) - len(bad)}/{len(mutants)} reduced forms pass equiv_evidence, {elapsed:.1f} s")
    assert ok, bad


def test_criterion_4_oracle_closure(tmp_path, verdict_line):
    # all 627 mutants x 5 repeats through every stage, fuzzed on 10 inputs each
    rep, batch = _run_oracle(tmp_path / "all", FAMILY_IDS, 5, 10)
    full_ok = len(rep.rows) == 3135 and rep.tables["overall"]["percent"] == "100.00" and batch.ok

    start = time.perf_counter()
    scaled, _ = _run_oracle(tmp_path / "scaled", ("linear", "quadratic"), 2, 100)
    elapsed = time.perf_counter() - start
    scaled_ok = scaled.tables["overall"]["percent"] == "100.00" and elapsed < 300
    ok = full_ok and scaled_ok
    verdict_line(
        "4",
        ok,
        f"627x5 run: {len(rep.rows)} rows at {rep.tables['overall']['percent']}%; "
        f"scaled profile (2 families, 2 repeats, 100 inputs): {len(scaled.rows)} rows at "
        f"{scaled.tables['overall']['percent']}% in {elapsed:.0f} s",
    )
    assert ok


@pytest.mark.parametrize("p", [0.1, 0.5])
def test_criterion_5_fault_calibration(p, tmp_path, verdict_line):
    cfg = RunConfig(
        out=str(tmp_path),
        backend=BackendConfig(kind="mock_faulty", fault_rate=p, repeats=1),
        fuzz=FuzzConfig(inputs_per_program=20),
    )
    rep, _ = Run(cfg).run_all()
    n = len(rep.rows)
    measured = sum(r.verdict != EQUIVALENT for r in rep.rows) / n
    bound = 3 * math.sqrt(p * (1 - p) / n)
    ok = n >= 400 and abs(measured - p) <= bound
    verdict_line(f"5 (p={p})", ok, f"N={n}, non-equivalent {measured:.4f}, |diff| {abs(measured - p):.4f} <= {bound:.4f}")
    assert ok


def test_criterion_6_known_bug(tmp_path, verdict_line):
    wrong = REFERENCE_SOURCES["linear"].replace("double x = -b / a;", "double x = (a - b) / a;")
    assert "(a - b) / a" in wrong
    cfg = FuzzConfig()
    prog = compile_program(wrong, tmp_path)
    verdict = fuzz_verdict(prog, "linear", cfg, rng=make_rng(cfg.seed, "fuzz"))
    # (a - b)/a - (-b/a) == 1 for every input, far beyond the 0.02 tolerance
    ok = verdict.outcome == NON_EQUIVALENT and verdict.counts["inputs"] == 1000 and verdict.rate == 0.0
    verdict_line("6", ok, f"{verdict.outcome} ({verdict.reason}), agreement {verdict.rate} over {verdict.counts['inputs']} inputs")
    assert ok


def test_criterion_7_constants(tmp_path, verdict_line, capsys):
    assert main(["mutate", "--out", str(tmp_path), "--families", "linear", "--max-distance", "1"]) == 0
    capsys.readouterr()
    (run_dir,) = tmp_path.iterdir()
    c = json.loads((run_dir / "manifest.json").read_text())["config"]
    h, g = c["harness"], c["gateway"]
    checks = {
        "epsilon_2dp": h["epsilon_2dp"] == 0.02,
        "epsilon_6dp": h["epsilon_6dp"] == 0.000002,
        "input_range": h["input_range"] == [-1000, 1000],
        "inputs_per_program": h["inputs_per_program"] == 1000,
        "repeats": g["repeats"] == 5,
        "temperature": g["temperature"] == 0,
        "provider_seed": g["seed"] == 0,
    }
    ok = all(checks.values())
    verdict_line("7", ok, ", ".join(f"{k}={'ok' if v else 'WRONG'}" for k, v in checks.items()))
    assert ok


def _golden_run(out: Path) -> Path:
    cfg = RunConfig(
        out=str(out),
        families=("linear", "quadratic", "sin", "log10"),
        per_distance=4,
        max_distance=3,
        backend=BackendConfig(kind="mock_faulty", fault_rate=0.3, repeats=2),
        fuzz=FuzzConfig(inputs_per_program=10),
        seed=11,
    )
    Run(cfg).run_all()
    return cfg.run_dir / "report"


def test_criterion_8_protocol_plotdata_golden(tmp_path, verdict_line, monkeypatch):
    # (a) the remote protocol end to end, against an in-process fake service
    monkeypatch.setenv("SYNROB_API_KEY", "test-key")
    requests = []

    def service(request):
        body = json.loads(request.content)
        requests.append(body)
        code = REFERENCE_SOURCES["linear"]
        return httpx.Response(200, json={"choices": [{"message": {"content": f"```c\n{code}```"}}]})

    cfg = RunConfig(
        out=str(tmp_path / "remote"),
        families=("linear",),
        max_distance=1,
        backend=BackendConfig(kind="remote", model="any-model", endpoint="https://service.invalid/v1", repeats=5),
        fuzz=FuzzConfig(inputs_per_program=10),
    )
    backend = RemoteBackend(cfg.backend, httpx.Client(transport=httpx.MockTransport(service)), RateLimiter(10_000))
    rep, _ = Run(cfg, backend=backend).run_all()
    protocol_ok = (
        len(requests) == 9 * 5
        and all(len(b["messages"]) == 1 and b["messages"][0]["role"] == "user" for b in requests)
        and all(b["temperature"] == 0 and b["seed"] == 0 for b in requests)
        and rep.overall == 1.0
    )

    # (b) plot data on the figure axes: distance, mutation kind, equation type
    report_dir = _golden_run(tmp_path / "a")
    plots = {}
    for axis in ("distance", "mutation_kind", "family"):
        lines = (report_dir / f"degree_by_{axis}.dat").read_text().splitlines()
        plots[axis] = all(len(line.split()) == 2 and float(line.split()[1]) >= 0 for line in lines) and bool(lines)
    plot_ok = all(plots.values())

    # golden files and run-to-run determinism
    again = _golden_run(tmp_path / "b")
    names = ["results.csv", "report.json", "degree_by_distance.dat", "degree_by_mutation_kind.dat", "degree_by_family.dat"]
    same = all((report_dir / n).read_bytes() == (again / n).read_bytes() for n in names)
    golden = all((report_dir / n).read_bytes() == (GOLDEN / n).read_bytes() for n in names)
    ok = protocol_ok and plot_ok and same and golden
    verdict_line(
        "8",
        ok,
        f"remote protocol {'ok' if protocol_ok else 'BROKEN'} ({len(requests)} requests), "
        f"plot axes {plots}, rerun identical={same}, golden match={golden}",
    )
    assert ok
