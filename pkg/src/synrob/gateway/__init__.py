"""Obtaining generated code from a backend, with caching and repeats."""

from .backends import (
    Backend,
    GenerationError,
    MockBackend,
    RateLimiter,
    RemoteBackend,
    chat_wrap,
    make_backend,
    mock_faulty_policy,
)
from .batch import BatchReport, cached_results, generate, run_batch
from .cache import CacheIntegrityError, ResponseCache
from .config import (
    KINDS,
    MOCK_FAULTY,
    MOCK_ORACLE,
    MOCK_SENSITIVE,
    REMOTE,
    BackendConfig,
    GatewayConfigError,
    GenerationResult,
    cache_key,
    sweep,
)

__all__ = [
    "KINDS",
    "MOCK_FAULTY",
    "MOCK_ORACLE",
    "MOCK_SENSITIVE",
    "REMOTE",
    "Backend",
    "BackendConfig",
    "BatchReport",
    "CacheIntegrityError",
    "GatewayConfigError",
    "GenerationError",
    "GenerationResult",
    "MockBackend",
    "RateLimiter",
    "RemoteBackend",
    "ResponseCache",
    "cache_key",
    "cached_results",
    "chat_wrap",
    "generate",
    "make_backend",
    "mock_faulty_policy",
    "run_batch",
    "sweep",
]
