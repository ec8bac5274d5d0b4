"""Cached, resumable querying of a backend over many prompts."""

from __future__ import annotations

import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from ..prompts import PromptInstance
from .backends import Backend, GenerationError, make_backend
from .cache import CacheIntegrityError, ResponseCache
from .config import REMOTE, BackendConfig, GenerationResult

log = logging.getLogger(__name__)


def generate(
    instance: PromptInstance,
    config: BackendConfig,
    repeat: int,
    cache: ResponseCache,
    backend: Backend,
) -> GenerationResult:
    """One response for ``instance``, from the cache when possible.

    Failures never raise; they come back as a result without response text.
    """
    if not 0 <= repeat < config.repeats:
        raise ValueError(f"repeat {repeat} is outside [0, {config.repeats})")
    model = config.model_name
    args = (model, instance.key, repeat, instance.prompt_text, config.temperature, config.seed)
    try:
        entry = cache.get(*args)
    except CacheIntegrityError as exc:
        log.warning("%s; regenerating", exc)
        entry = None
        integrity = str(exc)
    else:
        integrity = ""
    if entry is not None:
        return GenerationResult(instance.key, repeat, entry["response_text"], entry["metadata"], True, time.time())
    try:
        text, meta = backend.complete(instance, repeat)
    except GenerationError as exc:
        return GenerationResult(instance.key, repeat, None, {"model": model}, False, time.time(), str(exc))
    if integrity:
        meta = {**meta, "replaced_corrupt_entry": True}
    cache.put(*args, text, meta)
    return GenerationResult(instance.key, repeat, text, meta, False, time.time())


@dataclass
class BatchReport:
    results: list[GenerationResult]
    calls: int = 0
    cache_hits: int = 0
    failed: list[tuple[str, int, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failed

    def summary(self) -> str:
        lines = [f"{len(self.results)} results, {self.cache_hits} from cache, {self.calls} backend calls"]
        if self.failed:
            lines.append(f"{len(self.failed)} failed:")
            lines.extend(f"  {key} repeat {rep}: {err}" for key, rep, err in self.failed)
        return "\n".join(lines)


class _Counting:
    """Wraps a backend to count the calls that actually reach it."""

    def __init__(self, inner: Backend) -> None:
        self.inner = inner
        self.calls = 0
        self._lock = threading.Lock()

    def complete(self, instance: PromptInstance, repeat: int) -> tuple[str, dict]:
        with self._lock:
            self.calls += 1
        return self.inner.complete(instance, repeat)


def run_batch(
    instances: Sequence[PromptInstance],
    config: BackendConfig,
    cache_root: str | Path,
    backend: Optional[Backend] = None,
    master_seed: int = 0,
) -> BatchReport:
    """``len(instances) * config.repeats`` results, ordered by (prompt key, repeat).

    Entries already in the cache are reused, so rerunning after an
    interruption only queries what is missing.
    """
    cache = ResponseCache(cache_root)
    counted = _Counting(backend or make_backend(config, master_seed))
    jobs = [(inst, r) for inst in instances for r in range(config.repeats)]
    # mock backends are CPU-bound and cheap; threads only pay off for I/O
    workers = config.max_in_flight if config.kind == REMOTE else 1
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda job: generate(job[0], config, job[1], cache, counted), jobs))
    else:
        results = [generate(inst, config, r, cache, counted) for inst, r in jobs]
    results.sort(key=lambda res: (res.mutant_id, res.repeat))
    report = BatchReport(results, counted.calls, sum(r.cache_hit for r in results))
    report.failed = [(r.mutant_id, r.repeat, r.error) for r in results if not r.ok]
    return report


def cached_results(
    instances: Sequence[PromptInstance], config: BackendConfig, cache_root: str | Path
) -> list[GenerationResult]:
    """Results read from the cache alone; missing or corrupt entries come back failed."""
    cache = ResponseCache(cache_root)
    out = []
    for inst in instances:
        for r in range(config.repeats):
            try:
                entry = cache.get(config.model_name, inst.key, r, inst.prompt_text, config.temperature, config.seed)
                error = "" if entry else "no cached response"
            except CacheIntegrityError as exc:
                entry, error = None, str(exc)
            if entry is None:
                out.append(GenerationResult(inst.key, r, None, {}, False, time.time(), error))
            else:
                out.append(GenerationResult(inst.key, r, entry["response_text"], entry["metadata"], True, time.time()))
    out.sort(key=lambda res: (res.mutant_id, res.repeat))
    return out
