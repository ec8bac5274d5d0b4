"""Hand-written reference solvers, in C and as Python mirrors.

The C sources are what an ideal code generator would return; the Python
functions produce the exact lines those programs print, using the same libm
routines, so fuzzing can compare against them without running the reference
binary for every input.
"""

from __future__ import annotations

import math
from typing import Sequence

from ..formula import get_family

NO_REAL_ROOTS = "No real roots"

_HEADER = "#include <stdio.h>\n#include <math.h>\n\n"


def _two_coef(body: str) -> str:
    return (
        _HEADER
        + "int main(void) {\n"
        "    double a, b;\n"
        '    if (scanf("%lf %lf", &a, &b) != 2) return 1;\n'
        + body
        + "    return 0;\n}\n"
    )


def _scalar(expr: str, digits: int) -> str:
    return _two_coef(f"    double x = {expr};\n" f'    printf("%.{digits}f\\n", x);\n')


def _quadratic(disc: str) -> str:
    return (
        _HEADER
        + "int main(void) {\n"
        "    double a, b, c;\n"
        '    if (scanf("%lf %lf %lf", &a, &b, &c) != 3) return 1;\n'
        f"    double d = {disc};\n"
        "    if (d < 0) {\n"
        f'        printf("{NO_REAL_ROOTS}\\n");\n'
        "        return 0;\n"
        "    }\n"
        "    double r1 = (-b + sqrt(d)) / (2 * a);\n"
        "    double r2 = (-b - sqrt(d)) / (2 * a);\n"
        '    printf("%.2f, %.2f\\n", r1, r2);\n'
        "    return 0;\n}\n"
    )


REFERENCE_SOURCES: dict[str, str] = {
    "linear": _scalar("-b / a", 2),
    "quadratic": _quadratic("b * b - 4 * a * c"),
    "sin": _scalar("asin(b / a)", 6),
    "cos": _scalar("acos(b / a)", 6),
    "tan": _scalar("atan(b / a)", 6),
    "log10": _scalar("pow(10, b / a)", 2),
    "ln": _scalar("exp(b / a)", 2),
}

# One plausible wrong answer per family.  The linear one is the program a
# real generator produced for the prompt "a*x + a + b = a".
FAULTY_SOURCES: dict[str, str] = {
    "linear": _scalar("(a - b) / a", 2),
    "quadratic": _quadratic("b * b + 4 * a * c"),
    "sin": _scalar("acos(b / a)", 6),
    "cos": _scalar("asin(b / a)", 6),
    "tan": _scalar("atan(a / b)", 6),
    "log10": _scalar("exp(b / a)", 2),
    "ln": _scalar("pow(10, b / a)", 2),
}


def reference_value(family: str, coeffs: Sequence[float]) -> list[float] | None:
    """Unrounded solution list, or ``None`` when a quadratic has no real root."""
    fam = get_family(family)
    if len(coeffs) != len(fam.coefficients) or any(v == 0 for v in coeffs):
        raise ValueError(f"{family} needs {len(fam.coefficients)} nonzero coefficients, got {coeffs!r}")
    a, b = coeffs[0], coeffs[1]
    if family == "linear":
        return [-b / a]
    if family == "quadratic":
        c = coeffs[2]
        d = b * b - 4 * a * c
        if d < 0:
            return None
        return [(-b + math.sqrt(d)) / (2 * a), (-b - math.sqrt(d)) / (2 * a)]
    if family in ("sin", "cos"):
        if abs(b) > abs(a):
            raise ValueError(f"{family} needs |b| <= |a|, got a={a!r}, b={b!r}")
        return [(math.asin if family == "sin" else math.acos)(b / a)]
    if family == "tan":
        return [math.atan(b / a)]
    try:
        return [10.0 ** (b / a) if family == "log10" else math.exp(b / a)]
    except OverflowError:
        return [math.inf]


def format_output(family: str, values: list[float] | None) -> str:
    if values is None:
        return NO_REAL_ROOTS
    digits = get_family(family).precision
    return ", ".join(_c_format(v, digits) for v in values)


def _c_format(v: float, digits: int) -> str:
    # printf spells the non-finite values this way
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.{digits}f}"


def reference_output(family: str, coeffs: Sequence[float]) -> str:
    """The line the reference program prints for ``coeffs``, without the newline."""
    return format_output(family, reference_value(family, coeffs))
