"""Code generators: offline mocks and a chat-completion HTTP client."""

from __future__ import annotations

import collections
import random
import threading
import time
from typing import Callable, Protocol

import httpx

from ..formula import parse
from ..harness.reference import FAULTY_SOURCES, REFERENCE_SOURCES
from ..prompts import PromptInstance
from ..reduction import reduce_fixpoint
from ..seeding import make_rng
from .config import MOCK_FAULTY, MOCK_ORACLE, REMOTE, BackendConfig

_INTROS = (
    "Here is a C program that solves the equation:",
    "Sure! Below is the C code:",
    "The following program reads the coefficients and prints the solution.",
)
_OUTROS = (
    "Compile it with `gcc prog.c -o prog -lm`.",
    "The program uses `double` so it handles real-valued inputs.",
    "",
)


class GenerationError(RuntimeError):
    """A query that produced no usable response."""


class Backend(Protocol):
    def complete(self, instance: PromptInstance, repeat: int) -> tuple[str, dict]: ...


def chat_wrap(source: str, rng: random.Random) -> str:
    """Dress a program up the way a chat model tends to answer."""
    intro, outro = rng.choice(_INTROS), rng.choice(_OUTROS)
    text = f"{intro}\n\n```c\n{source}```\n"
    return text + (f"\n{outro}\n" if outro else "")


def mock_faulty_policy(rng: random.Random, p: float, family: str) -> str:
    """With probability ``p`` a known-wrong program for ``family``, else the reference."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"fault rate {p} is outside [0, 1]")
    wrong = rng.random() < p
    return chat_wrap((FAULTY_SOURCES if wrong else REFERENCE_SOURCES)[family], rng)


class MockBackend:
    """Deterministic stand-in for a code generator.

    ``mock_oracle`` always answers with the reference program.
    ``mock_faulty`` answers wrongly at the configured rate.
    ``mock_sensitive`` answers correctly only when the prompt's equation is
    already fully reduced, which models a generator that copes with the
    canonical form and nothing else.
    """

    def __init__(self, config: BackendConfig, master_seed: int = 0) -> None:
        if config.kind == REMOTE:
            raise ValueError("MockBackend cannot serve the remote kind")
        self.config = config
        self.master_seed = master_seed

    def complete(self, instance: PromptInstance, repeat: int) -> tuple[str, dict]:
        rng = make_rng(self.master_seed, self.config.seed, "mock", self.config.kind, instance.key, repeat)
        kind = self.config.kind
        if kind == MOCK_ORACLE:
            text = chat_wrap(REFERENCE_SOURCES[instance.family], rng)
        elif kind == MOCK_FAULTY:
            text = mock_faulty_policy(rng, self.config.fault_rate, instance.family)
        else:
            f = parse(instance.formula_text)
            sources = REFERENCE_SOURCES if reduce_fixpoint(f) == f else FAULTY_SOURCES
            text = chat_wrap(sources[instance.family], rng)
        return text, {"backend": kind, "model": self.config.model_name}


class RateLimiter:
    """Sliding one-minute window allowing at most ``per_minute`` acquisitions."""

    def __init__(
        self,
        per_minute: int,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self.per_minute = per_minute
        self.clock = clock
        self.sleep = sleep
        self._stamps: collections.deque[float] = collections.deque()
        self._lock = threading.Lock()

    def acquire(self) -> float:
        with self._lock:
            while True:
                now = self.clock()
                while self._stamps and now - self._stamps[0] >= 60.0:
                    self._stamps.popleft()
                if len(self._stamps) < self.per_minute:
                    self._stamps.append(now)
                    return now
                self.sleep(60.0 - (now - self._stamps[0]))


_RETRYABLE = {408, 409, 425, 429, 500, 502, 503, 504}


class RemoteBackend:
    """Chat-completion style HTTP backend.

    Each request carries exactly one user message holding the prompt.
    Transport errors and retryable status codes are retried with
    exponential backoff up to the retry budget.
    """

    def __init__(
        self,
        config: BackendConfig,
        client: httpx.Client | None = None,
        limiter: RateLimiter | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self.config = config
        self.api_key = config.api_key()
        self.client = client or httpx.Client(timeout=config.request_timeout)
        self.limiter = limiter or RateLimiter(config.requests_per_minute)
        self.sleep = sleep

    def payload(self, prompt_text: str) -> dict:
        body = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt_text}],
            "temperature": self.config.temperature,
            "seed": self.config.seed,
        }
        if self.config.top_p is not None:
            body["top_p"] = self.config.top_p
        return body

    def complete(self, instance: PromptInstance, repeat: int) -> tuple[str, dict]:
        headers = {"Authorization": f"Bearer {self.api_key}"}
        last = ""
        for attempt in range(self.config.retry_budget + 1):
            if attempt:
                self.sleep(min(2.0**attempt, 60.0))
            self.limiter.acquire()
            start = time.monotonic()
            try:
                resp = self.client.post(self.config.endpoint, json=self.payload(instance.prompt_text), headers=headers)
            except httpx.HTTPError as exc:
                last = f"transport error: {exc}"
                continue
            if resp.status_code in (401, 403):
                raise GenerationError(f"authentication failed (HTTP {resp.status_code})")
            if resp.status_code in _RETRYABLE:
                last = f"HTTP {resp.status_code}"
                continue
            if resp.status_code >= 400:
                raise GenerationError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                data = resp.json()
                text = data["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise GenerationError(f"malformed response body ({exc})") from exc
            if not isinstance(text, str):
                raise GenerationError("response content is not text")
            meta = {
                "backend": REMOTE,
                "model": data.get("model", self.config.model),
                "latency_s": round(time.monotonic() - start, 3),
                "usage": data.get("usage", {}),
                "attempts": attempt + 1,
            }
            return text, meta
        raise GenerationError(f"retry budget exhausted after {self.config.retry_budget + 1} attempts ({last})")


def make_backend(config: BackendConfig, master_seed: int = 0) -> Backend:
    if config.kind == REMOTE:
        return RemoteBackend(config)
    return MockBackend(config, master_seed)
