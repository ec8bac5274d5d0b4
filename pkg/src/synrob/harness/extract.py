"""Pull a C translation unit out of a chat-style response."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

_FENCE = re.compile(r"^[ \t]*```[^\n`]*\n(.*?)^[ \t]*```", re.M | re.S)
_MAIN = re.compile(r"\bmain\s*\(")
_CODE_START = re.compile(
    r"^\s*(#\s*(include|define)|(static\s+)?(int|void|double|float|long|char|unsigned|const)\b|/[/*])"
)


@dataclass(frozen=True)
class ExtractedSource:
    mutant_id: str
    repeat: int
    source: str
    notes: tuple[str, ...] = field(default=())
    ok: bool = True


def _from_fences(text: str) -> tuple[str | None, list[str]]:
    blocks = [m.group(1) for m in _FENCE.finditer(text)]
    if not blocks:
        return None, []
    notes = [f"{len(blocks)} fenced block(s)"]
    with_main = [b for b in blocks if _MAIN.search(b)]
    if not with_main:
        return None, notes + ["no fenced block defines main"]
    # max() keeps the first of equally long blocks
    return max(with_main, key=len), notes + ["fences stripped"]


def _from_prose(text: str) -> tuple[str | None, list[str]]:
    lines = text.splitlines()
    start = next((i for i, line in enumerate(lines) if _CODE_START.match(line)), None)
    end = next((i for i in range(len(lines) - 1, -1, -1) if lines[i].rstrip().endswith("}")), None)
    if start is None or end is None or end < start:
        return None, ["no code-like lines"]
    body = "\n".join(lines[start : end + 1]) + "\n"
    if not _MAIN.search(body):
        return None, ["no main in unfenced text"]
    notes = []
    if start > 0:
        notes.append(f"dropped {start} leading prose line(s)")
    if end < len(lines) - 1:
        notes.append(f"dropped {len(lines) - 1 - end} trailing prose line(s)")
    return body, notes


def extract_code(response: str, mutant_id: str = "", repeat: int = 0) -> ExtractedSource:
    """Select the C program in ``response``.

    The largest fenced block containing ``main`` wins.  Without fences,
    leading and trailing prose is trimmed by looking for the first line that
    starts like C and the last line that closes a brace.
    """
    source, notes = _from_fences(response)
    if source is None and not notes:
        source, notes = _from_prose(response)
    if source is None:
        return ExtractedSource(mutant_id, repeat, "", tuple(notes), ok=False)
    return ExtractedSource(mutant_id, repeat, source, tuple(notes))
