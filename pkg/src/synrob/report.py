"""Robustness degree and its breakdowns, written as CSV, JSON and plot data.

The degree of a set of rows is the share whose program was judged
equivalent to the reference.  Suspect verdicts (agreement on at least 90%
of inputs but not all) are resolved by a policy: count them as
non-equivalent (the default), as equivalent, or drop them.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

from .harness.fuzz import EQUIVALENT, SUSPECT

POLICIES = ("nonequivalent", "equivalent", "exclude")
AXES = ("distance", "mutation_kind", "family", "model", "preprocessed")
PLOT_AXES = ("distance", "mutation_kind", "family")

CSV_COLUMNS = (
    "mutant_id",
    "family",
    "distance",
    "mutation_kinds",
    "model",
    "repeat",
    "preprocessed",
    "verdict",
    "agreement_rate",
    "reason",
)


@dataclass(frozen=True)
class ResultRow:
    mutant_id: str
    family: str
    distance: int
    mutation_kinds: tuple[str, ...]
    model: str
    repeat: int
    preprocessed: bool
    verdict: str
    agreement_rate: float
    reason: str = ""

    def sort_key(self) -> tuple:
        return (self.mutant_id, self.repeat, self.model, self.preprocessed)

    def to_json(self) -> dict:
        d = asdict(self)
        d["mutation_kinds"] = list(self.mutation_kinds)
        return d

    @classmethod
    def from_json(cls, data: dict) -> "ResultRow":
        return cls(**{**data, "mutation_kinds": tuple(data["mutation_kinds"])})


def _resolve(verdict: str, policy: str) -> Optional[bool]:
    """Whether a verdict counts as equivalent; ``None`` drops the row."""
    if verdict == SUSPECT:
        return {"nonequivalent": False, "equivalent": True, "exclude": None}[policy]
    return verdict == EQUIVALENT


def counts(rows: Iterable[ResultRow], policy: str = "nonequivalent") -> tuple[int, int]:
    """(equivalent, counted) over ``rows`` under ``policy``."""
    if policy not in POLICIES:
        raise ValueError(f"unknown suspect policy {policy!r}")
    eq = total = 0
    for row in rows:
        r = _resolve(row.verdict, policy)
        if r is None:
            continue
        total += 1
        eq += r
    return eq, total


def degree(
    rows: Iterable[ResultRow],
    where: Optional[Callable[[ResultRow], bool]] = None,
    policy: str = "nonequivalent",
) -> float:
    selected = [r for r in rows if where is None or where(r)]
    eq, total = counts(selected, policy)
    if total == 0:
        raise ValueError("degree of an empty selection")
    return eq / total


def percent(eq: int, total: int) -> str:
    return f"{100 * eq / total:.2f}"


@dataclass(frozen=True)
class Cell:
    value: object
    equivalent: int
    total: int

    @property
    def degree(self) -> float:
        return self.equivalent / self.total

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "equivalent": self.equivalent,
            "total": self.total,
            "degree": self.degree,
            "percent": percent(self.equivalent, self.total),
        }


def _axis_values(row: ResultRow, axis: str, distance1_kinds: bool) -> tuple:
    if axis == "mutation_kind":
        if distance1_kinds and row.distance != 1:
            return ()
        return row.mutation_kinds
    return (getattr(row, axis),)


def aggregate_by(
    rows: Sequence[ResultRow],
    axis: str,
    policy: str = "nonequivalent",
    distance1_kinds: bool = False,
) -> list[Cell]:
    """One cell per value of ``axis``, sorted by value.

    For ``mutation_kind`` a row counts toward every kind in its chain; with
    ``distance1_kinds`` only single-mutation rows are counted.
    """
    if axis not in AXES:
        raise ValueError(f"unknown axis {axis!r}; expected one of {', '.join(AXES)}")
    groups: dict[object, list[ResultRow]] = {}
    for row in rows:
        for v in _axis_values(row, axis, distance1_kinds):
            groups.setdefault(v, []).append(row)
    cells = []
    for value in sorted(groups):
        eq, total = counts(groups[value], policy)
        if total:
            cells.append(Cell(value, eq, total))
    return cells


@dataclass
class RobustnessReport:
    rows: list[ResultRow]
    policy: str = "nonequivalent"
    distance1_kinds: bool = False
    manifest: str = ""
    tables: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.rows = sorted(self.rows, key=ResultRow.sort_key)
        if not self.tables:
            self.tables = compute_tables(self.rows, self.policy, self.distance1_kinds)

    @property
    def overall(self) -> float:
        return self.tables["overall"]["degree"]

    def to_json(self) -> dict:
        return {
            "manifest": self.manifest,
            "policy": self.policy,
            "distance1_kinds": self.distance1_kinds,
            "aggregates": self.tables,
            "rows": [r.to_json() for r in self.rows],
        }


def compute_tables(rows: Sequence[ResultRow], policy: str, distance1_kinds: bool = False) -> dict:
    eq, total = counts(rows, policy)
    if total == 0:
        raise ValueError("cannot report on zero counted rows")
    tables: dict = {"overall": Cell("all", eq, total).to_json()}
    for axis in AXES:
        tables[axis] = [c.to_json() for c in aggregate_by(rows, axis, policy)]
    if distance1_kinds:
        tables["mutation_kind_distance1"] = [c.to_json() for c in aggregate_by(rows, "mutation_kind", policy, True)]
    return tables


def _csv_text(rows: Sequence[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow(
            [
                r.mutant_id,
                r.family,
                r.distance,
                "+".join(r.mutation_kinds),
                r.model,
                r.repeat,
                str(r.preprocessed).lower(),
                r.verdict,
                repr(r.agreement_rate),
                r.reason,
            ]
        )
    return buf.getvalue()


def _plot_text(cells: Iterable[dict]) -> str:
    return "".join(f"{_plot_value(c['value'])} {c['percent']}\n" for c in cells)


def _plot_value(v: object) -> str:
    return str(v).lower() if isinstance(v, bool) else str(v)


def emit(report: RobustnessReport, fmt: str, out_dir: str | Path) -> list[Path]:
    """Write ``report`` in ``fmt`` (csv, json or plotdata) under ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: dict[str, str] = {}
    if fmt == "csv":
        files["results.csv"] = _csv_text(report.rows)
    elif fmt == "json":
        files["report.json"] = json.dumps(report.to_json(), indent=1, sort_keys=True) + "\n"
    elif fmt == "plotdata":
        axes = list(PLOT_AXES)
        axes += [a for a in ("model", "preprocessed") if len(report.tables[a]) > 1]
        if report.distance1_kinds:
            axes.append("mutation_kind_distance1")
        for axis in axes:
            files[f"degree_by_{axis}.dat"] = _plot_text(report.tables[axis])
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    paths = []
    for name, text in files.items():
        p = out / name
        p.write_text(text, encoding="utf-8", newline="\n")
        paths.append(p)
    return paths


def load_report(path: str | Path) -> RobustnessReport:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    rows = [ResultRow.from_json(r) for r in data["rows"]]
    return RobustnessReport(rows, data["policy"], data["distance1_kinds"], data["manifest"], data["aggregates"])


def verify_report(path: str | Path) -> list[str]:
    """Tables in a JSON report that differ from a recomputation from its rows."""
    report = load_report(path)
    fresh = json.loads(json.dumps(compute_tables(report.rows, report.policy, report.distance1_kinds)))
    return sorted(k for k in set(fresh) | set(report.tables) if fresh.get(k) != report.tables.get(k))
