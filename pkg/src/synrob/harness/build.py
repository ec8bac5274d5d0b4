"""Compiling extracted sources with an external C compiler."""

from __future__ import annotations

import hashlib
import os
import shutil
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

DEFAULT_COMPILER: tuple[str, ...] = ("gcc", "-O0", "-o", "{out}", "{src}", "-lm")

OK = "ok"
COMPILE_ERROR = "compile_error"

# sqrt of a runtime value, so the call cannot be folded away and the link
# step really needs the math library
_PROBE = '#include <math.h>\n#include <stdio.h>\nint main(int n, char **v) { printf("%.1f\\n", sqrt(n * 4.0)); return 0; }\n'


class CompilerMissingError(RuntimeError):
    """The configured compiler cannot be run at all."""


@dataclass(frozen=True)
class CompiledProgram:
    source_path: Path
    binary_path: Path | None
    log: str
    status: str

    @property
    def ok(self) -> bool:
        return self.status == OK


def _command(template: Sequence[str], src: Path, out: Path) -> list[str]:
    return [part.format(src=src, out=out) for part in template]


def compile_program(
    source: str,
    workdir: str | Path,
    compiler: Sequence[str] = DEFAULT_COMPILER,
    timeout: float = 60.0,
    cache_dir: str | Path | None = None,
) -> CompiledProgram:
    """Write ``source`` to ``workdir/prog.c`` and compile it.

    With ``cache_dir`` set, binaries are shared between identical sources
    (keyed by a hash of source and compiler command), which matters when a
    mock backend hands back the same program thousands of times.
    """
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    src = workdir / "prog.c"
    src.write_text(source, encoding="utf-8")

    if cache_dir is not None:
        digest = hashlib.sha256("\0".join([*compiler, source]).encode()).hexdigest()[:24]
        cached = Path(cache_dir) / digest
        if (cached / "status").exists():
            status = (cached / "status").read_text()
            log = (cached / "compile.log").read_text()
            (workdir / "compile.log").write_text(log)
            binary = cached / "prog" if status == OK else None
            return CompiledProgram(src, binary, log, status)
        Path(cache_dir).mkdir(parents=True, exist_ok=True)
        result = compile_program(source, Path(tempfile.mkdtemp(dir=cache_dir, prefix=".tmp-")), compiler, timeout)
        _publish(result, cached)
        return compile_program(source, workdir, compiler, timeout, cache_dir)

    out = workdir / "prog"
    try:
        proc = subprocess.run(
            _command(compiler, src, out), capture_output=True, text=True, timeout=timeout, errors="replace"
        )
    except FileNotFoundError as exc:
        raise CompilerMissingError(f"compiler {compiler[0]!r} not found") from exc
    except subprocess.TimeoutExpired:
        log = f"compiler timed out after {timeout} s\n"
        (workdir / "compile.log").write_text(log)
        return CompiledProgram(src, None, log, COMPILE_ERROR)
    log = proc.stdout + proc.stderr
    (workdir / "compile.log").write_text(log)
    if proc.returncode != 0 or not out.exists():
        return CompiledProgram(src, None, log, COMPILE_ERROR)
    return CompiledProgram(src, out, log, OK)


def _publish(result: CompiledProgram, target: Path) -> None:
    tmp = result.source_path.parent
    (tmp / "status").write_text(result.status)
    try:
        os.rename(tmp, target)
    except OSError:
        # another worker got there first; its entry is equivalent
        shutil.rmtree(tmp, ignore_errors=True)


def probe_compiler(compiler: Sequence[str] = DEFAULT_COMPILER) -> None:
    """Fail fast unless ``compiler`` builds and runs a program calling ``sqrt``."""
    with tempfile.TemporaryDirectory(prefix="synrob-probe-") as tmp:
        prog = compile_program(_PROBE, tmp, compiler)
        if not prog.ok:
            raise CompilerMissingError(f"compiler probe failed:\n{prog.log}")
        out = subprocess.run([str(prog.binary_path)], capture_output=True, text=True, timeout=10).stdout
        if out.strip() != "2.0":
            raise CompilerMissingError(f"compiler probe printed {out!r}, expected '2.0'")
