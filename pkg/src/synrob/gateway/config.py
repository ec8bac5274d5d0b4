"""Backend settings and the per-query result record."""

from __future__ import annotations

import hashlib
import itertools
import json
import os
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Optional

REMOTE = "remote"
MOCK_ORACLE = "mock_oracle"
MOCK_FAULTY = "mock_faulty"
MOCK_SENSITIVE = "mock_sensitive"
KINDS = (REMOTE, MOCK_ORACLE, MOCK_FAULTY, MOCK_SENSITIVE)


class GatewayConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BackendConfig:
    kind: str = MOCK_ORACLE
    model: str = ""
    temperature: float = 0.0
    seed: int = 0
    repeats: int = 5
    top_p: Optional[float] = None
    requests_per_minute: int = 60
    retry_budget: int = 3
    api_key_env: str = "SYNROB_API_KEY"
    endpoint: str = ""
    max_in_flight: int = 4
    fault_rate: float = 0.0
    request_timeout: float = 120.0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise GatewayConfigError(f"unknown backend kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.repeats < 1:
            raise GatewayConfigError("repeats must be at least 1")
        if not 0.0 <= self.fault_rate <= 1.0:
            raise GatewayConfigError(f"fault rate {self.fault_rate} is outside [0, 1]")
        if self.max_in_flight < 1 or self.requests_per_minute < 1 or self.retry_budget < 0:
            raise GatewayConfigError("max_in_flight and requests_per_minute must be positive, retry_budget >= 0")
        if self.kind == REMOTE and not (self.model and self.endpoint):
            raise GatewayConfigError("the remote backend needs both a model name and an endpoint URL")

    @property
    def model_name(self) -> str:
        """Model label used in cache keys and paths.

        Mock backends default to a label that includes the fault rate, so
        runs at different rates never share cache entries.
        """
        if self.model:
            return self.model
        if self.kind == MOCK_FAULTY:
            return f"{self.kind}-p{self.fault_rate:g}"
        return self.kind

    def api_key(self) -> str:
        key = os.environ.get(self.api_key_env, "")
        if not key:
            raise GatewayConfigError(f"environment variable {self.api_key_env} is not set")
        return key

    def fingerprint(self) -> str:
        parts = [self.kind, self.model_name, self.temperature, self.seed, self.top_p, self.fault_rate, self.endpoint]
        return hashlib.sha256(json.dumps(parts).encode()).hexdigest()[:16]

    def to_json(self) -> dict:
        return asdict(self)


def sweep(
    base: BackendConfig,
    temperatures: Iterable[float] = (0.0,),
    top_ps: Iterable[Optional[float]] = (None,),
    seeds: Iterable[int] = (0,),
) -> list[BackendConfig]:
    """Every combination of the given sampling settings on top of ``base``."""
    return [
        replace(base, temperature=t, top_p=p, seed=s)
        for t, p, s in itertools.product(temperatures, top_ps, seeds)
    ]


def cache_key(model: str, prompt_text: str, repeat: int, temperature: float, seed: int) -> str:
    payload = json.dumps([model, prompt_text, repeat, temperature, seed], ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class GenerationResult:
    mutant_id: str
    repeat: int
    response_text: Optional[str]
    metadata: dict = field(default_factory=dict)
    cache_hit: bool = False
    timestamp: float = 0.0
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.response_text is not None
