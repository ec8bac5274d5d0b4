"""End-to-end robustness runs: mutate, prompt, generate, evaluate, report.

Every stage reads the previous stage's files from the run directory and
writes its own, so any stage can be rerun on its own and an interrupted
run picks up where it stopped.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from .formula import FAMILY_IDS
from .gateway import Backend, BackendConfig, BatchReport, GenerationResult, cached_results, run_batch
from .harness import FuzzConfig, Verdict, evaluate_response, probe_compiler
from .mutation import MutantRecord, dump_mutants, load_mutants, sample_variants
from .prompts import PromptInstance, build_prompts, dump_prompts, load_prompts
from .report import POLICIES, ResultRow, RobustnessReport, emit
from .seeding import make_rng

log = logging.getLogger(__name__)

STAGES = ("mutate", "prompts", "generate", "evaluate", "report")


class StageError(RuntimeError):
    """A stage could not run; the message says how to resume."""


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    out: str = "runs"
    run_id: str = ""
    families: tuple[str, ...] = FAMILY_IDS
    per_distance: int = 20
    max_distance: int = 5
    preprocess: bool = False
    backend: BackendConfig = field(default_factory=BackendConfig)
    fuzz: FuzzConfig = field(default_factory=FuzzConfig)
    suspect_policy: str = "nonequivalent"
    distance1_kinds: bool = False
    workers: int = 0

    def __post_init__(self) -> None:
        unknown = [f for f in self.families if f not in FAMILY_IDS]
        if unknown:
            raise ValueError(f"unknown families: {', '.join(unknown)}")
        if not self.families:
            raise ValueError("at least one family is required")
        if self.per_distance < 1 or self.max_distance < 1:
            raise ValueError("per_distance and max_distance must be at least 1")
        if self.suspect_policy not in POLICIES:
            raise ValueError(f"suspect policy must be one of {', '.join(POLICIES)}")

    def effective(self) -> dict:
        """Every knob, as recorded in the manifest and hashed into the run id."""
        return {
            "seed": self.seed,
            "mutation": {
                "families": list(self.families),
                "per_distance": self.per_distance,
                "max_distance": self.max_distance,
            },
            "prompts": {"preprocess": self.preprocess},
            "gateway": self.backend.to_json(),
            "harness": self.fuzz.to_json(),
            "report": {"suspect_policy": self.suspect_policy, "distance1_kinds": self.distance1_kinds},
        }

    @property
    def resolved_run_id(self) -> str:
        if self.run_id:
            return self.run_id
        blob = json.dumps(self.effective(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]

    @property
    def run_dir(self) -> Path:
        return Path(self.out) / self.resolved_run_id

    @property
    def worker_count(self) -> int:
        return self.workers or os.cpu_count() or 1


def _write_json(path: Path, data) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    os.replace(tmp, path)


class Run:
    """One run directory and the stages that fill it."""

    def __init__(self, config: RunConfig, backend: Optional[Backend] = None) -> None:
        self.config = config
        self.backend = backend
        self.dir = config.run_dir
        self.dir.mkdir(parents=True, exist_ok=True)
        self.manifest_path = self.dir / "manifest.json"
        if self.manifest_path.exists():
            self.manifest = json.loads(self.manifest_path.read_text())
            if self.manifest.get("config") != config.effective():
                raise StageError(
                    f"{self.dir} holds a run with a different configuration; pass another --run-id or --out"
                )
        else:
            self.manifest = {
                "run_id": config.resolved_run_id,
                "tool_version": __version__,
                "master_seed": config.seed,
                "config": config.effective(),
                "notes": {
                    "term_order": "mutants keep the order produced by the mutation rules; "
                    "reduced formulas list terms with x first",
                    "nonzero_guard": f"|v| >= {config.fuzz.min_magnitude}",
                    "inputs": "integers" if config.fuzz.integer_inputs else "reals",
                    "trig_compare": config.fuzz.trig_compare,
                },
                "files": {},
                "counts": {},
                "stages": {},
            }
            self._save()

    # paths
    @property
    def mutants_path(self) -> Path:
        return self.dir / "mutants.jsonl"

    @property
    def prompts_path(self) -> Path:
        return self.dir / "prompts.jsonl"

    @property
    def responses_dir(self) -> Path:
        return self.dir / "responses"

    @property
    def programs_dir(self) -> Path:
        return self.dir / "programs"

    @property
    def rows_path(self) -> Path:
        return self.dir / "rows.jsonl"

    @property
    def report_dir(self) -> Path:
        return self.dir / "report"

    def _save(self) -> None:
        _write_json(self.manifest_path, self.manifest)

    def _record(self, stage: str, started: float, files: dict, counts: dict) -> None:
        self.manifest["files"].update(files)
        self.manifest["counts"].update(counts)
        self.manifest["stages"][stage] = {"started": started, "finished": time.time()}
        self._save()

    def _require(self, path: Path, stage: str) -> None:
        if not path.exists():
            raise StageError(f"{path} is missing; run `synrob {stage}` with the same options first")

    # stages
    def mutate(self) -> list[MutantRecord]:
        started = time.time()
        if self.mutants_path.exists():
            records = load_mutants(self.mutants_path)
        else:
            c = self.config
            records = sample_variants(c.families, c.per_distance, c.max_distance, c.seed)
            dump_mutants(records, self.mutants_path)
        self._record("mutate", started, {"mutants": self.mutants_path.name}, {"mutants": len(records)})
        return records

    def prompts(self) -> list[PromptInstance]:
        started = time.time()
        if self.prompts_path.exists():
            prompts = load_prompts(self.prompts_path)
        else:
            self._require(self.mutants_path, "mutate")
            prompts = build_prompts(load_mutants(self.mutants_path), self.config.preprocess)
            dump_prompts(prompts, self.prompts_path)
        self._record("prompts", started, {"prompts": self.prompts_path.name}, {"prompts": len(prompts)})
        return prompts

    def generate(self) -> BatchReport:
        started = time.time()
        self._require(self.prompts_path, "prompts")
        prompts = load_prompts(self.prompts_path)
        self.responses_dir.mkdir(exist_ok=True)
        report = run_batch(
            prompts, self.config.backend, self.responses_dir, backend=self.backend, master_seed=self.config.seed
        )
        counts = {"queries": len(report.results), "generation_failures": len(report.failed)}
        self._record("generate", started, {"responses": self.responses_dir.name + "/"}, counts)
        return report

    def evaluate(self) -> list[ResultRow]:
        started = time.time()
        self._require(self.mutants_path, "mutate")
        self._require(self.prompts_path, "prompts")
        probe_compiler(self.config.fuzz.compiler)
        mutants = {m.id: m for m in load_mutants(self.mutants_path)}
        prompts = {p.key: p for p in load_prompts(self.prompts_path)}
        self._require(self.responses_dir, "generate")
        results = cached_results(list(prompts.values()), self.config.backend, self.responses_dir)
        build_cache = self.dir / "build"

        def one(res: GenerationResult) -> ResultRow:
            prompt = prompts[res.mutant_id]
            verdict = self._verdict(prompt, res, build_cache)
            m = mutants[prompt.mutant_id]
            return ResultRow(
                m.id,
                m.family,
                m.distance,
                m.kinds,
                self.config.backend.model_name,
                res.repeat,
                prompt.preprocessed,
                verdict.outcome,
                verdict.rate,
                verdict.reason,
            )

        with ThreadPoolExecutor(self.config.worker_count) as pool:
            rows = list(pool.map(one, results))
        rows.sort(key=ResultRow.sort_key)
        self.rows_path.write_text("".join(json.dumps(r.to_json()) + "\n" for r in rows), encoding="utf-8")
        self._record(
            "evaluate",
            started,
            {"rows": self.rows_path.name, "programs": self.programs_dir.name + "/", "build": "build/"},
            {"verdicts": len(rows)},
        )
        return rows

    def _verdict(self, prompt: PromptInstance, res: GenerationResult, build_cache: Path) -> Verdict:
        workdir = self.programs_dir / prompt.key / str(res.repeat)
        digest = hashlib.sha256((res.response_text or "").encode()).hexdigest() if res.ok else "failed"
        stamp = workdir / "response.sha256"
        done = workdir / "verdict.json"
        if done.exists() and stamp.exists() and stamp.read_text() == digest:
            return Verdict.from_json(json.loads(done.read_text()))
        rng = make_rng(self.config.seed, "fuzz", prompt.key, res.repeat)
        verdict = evaluate_response(res.response_text, prompt.family, workdir, self.config.fuzz, rng, build_cache)
        stamp.write_text(digest)
        return verdict

    def report(self) -> RobustnessReport:
        started = time.time()
        self._require(self.rows_path, "evaluate")
        rows = [ResultRow.from_json(json.loads(line)) for line in self.rows_path.read_text().splitlines() if line]
        rep = RobustnessReport(
            rows, self.config.suspect_policy, self.config.distance1_kinds, manifest=self.manifest_path.name
        )
        paths = []
        for fmt in ("csv", "json", "plotdata"):
            paths += emit(rep, fmt, self.report_dir)
        files = {"report": sorted(str(p.relative_to(self.dir)) for p in paths)}
        self._record("report", started, files, {"report_rows": len(rows)})
        return rep

    def run_all(self) -> tuple[RobustnessReport, BatchReport]:
        self.mutate()
        self.prompts()
        batch = self.generate()
        self.evaluate()
        return self.report(), batch


def degree_summary(rep: RobustnessReport) -> str:
    t = rep.tables
    lines = [f"overall: {t['overall']['percent']}% ({t['overall']['equivalent']}/{t['overall']['total']})"]
    for axis in ("preprocessed", "family", "distance"):
        cells = ", ".join(f"{c['value']}={c['percent']}%" for c in t[axis])
        lines.append(f"by {axis}: {cells}")
    return "\n".join(lines)

