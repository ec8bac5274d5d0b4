"""Compile generated programs and fuzz them against reference solvers."""

from .build import DEFAULT_COMPILER, CompiledProgram, CompilerMissingError, compile_program, probe_compiler
from .extract import ExtractedSource, extract_code
from .fuzz import (
    COMPILE_ERROR,
    EQUIVALENT,
    GENERATION_FAILURE,
    NON_EQUIVALENT,
    OUTPUT_MISMATCH,
    OUTPUT_UNPARSEABLE,
    RUNTIME_FAILURE,
    SUSPECT,
    FuzzConfig,
    Verdict,
    agree,
    evaluate_response,
    fuzz_verdict,
    parse_numbers,
    run_once,
    sample_inputs,
)
from .reference import FAULTY_SOURCES, NO_REAL_ROOTS, REFERENCE_SOURCES, reference_output, reference_value

__all__ = [
    "COMPILE_ERROR",
    "DEFAULT_COMPILER",
    "EQUIVALENT",
    "FAULTY_SOURCES",
    "GENERATION_FAILURE",
    "NON_EQUIVALENT",
    "NO_REAL_ROOTS",
    "OUTPUT_MISMATCH",
    "OUTPUT_UNPARSEABLE",
    "REFERENCE_SOURCES",
    "RUNTIME_FAILURE",
    "SUSPECT",
    "CompiledProgram",
    "CompilerMissingError",
    "ExtractedSource",
    "FuzzConfig",
    "Verdict",
    "agree",
    "compile_program",
    "evaluate_response",
    "extract_code",
    "fuzz_verdict",
    "parse_numbers",
    "probe_compiler",
    "reference_output",
    "reference_value",
    "run_once",
    "sample_inputs",
]
