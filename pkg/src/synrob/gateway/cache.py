"""On-disk response cache, one JSON file per (model, prompt, repeat)."""

from __future__ import annotations

import json
import logging
import os
import re
import tempfile
from pathlib import Path
from typing import Optional

from .config import cache_key

log = logging.getLogger(__name__)


class CacheIntegrityError(ValueError):
    """A cache entry whose stored hash does not match its contents."""


def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", name)


class ResponseCache:
    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)

    def path(self, model: str, key: str, repeat: int) -> Path:
        return self.root / _safe(model) / _safe(key) / f"{repeat}.json"

    def get(
        self, model: str, key: str, repeat: int, prompt_text: str, temperature: float, seed: int
    ) -> Optional[dict]:
        """The stored entry, ``None`` when absent.

        Raises :class:`CacheIntegrityError` when the entry exists but its hash
        disagrees with a recomputation, or belongs to a different prompt.
        """
        p = self.path(model, key, repeat)
        try:
            entry = json.loads(p.read_text(encoding="utf-8"))
        except FileNotFoundError:
            return None
        except (OSError, ValueError) as exc:
            raise CacheIntegrityError(f"{p}: unreadable cache entry ({exc})") from exc
        stored = entry.get("key_hash")
        if stored != cache_key(model, entry.get("prompt_text", ""), repeat, temperature, seed):
            raise CacheIntegrityError(f"{p}: stored key hash does not match the stored prompt")
        if stored != cache_key(model, prompt_text, repeat, temperature, seed):
            raise CacheIntegrityError(f"{p}: entry was written for a different prompt or settings")
        return entry

    def put(
        self,
        model: str,
        key: str,
        repeat: int,
        prompt_text: str,
        temperature: float,
        seed: int,
        response_text: str,
        metadata: dict,
    ) -> Path:
        p = self.path(model, key, repeat)
        p.parent.mkdir(parents=True, exist_ok=True)
        entry = {
            "key_hash": cache_key(model, prompt_text, repeat, temperature, seed),
            "prompt_text": prompt_text,
            "response_text": response_text,
            "metadata": metadata,
        }
        fd, tmp = tempfile.mkstemp(dir=p.parent, prefix=f".{repeat}.", suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(entry, fh, sort_keys=True, ensure_ascii=False)
            fh.write("\n")
        os.replace(tmp, p)
        return p
