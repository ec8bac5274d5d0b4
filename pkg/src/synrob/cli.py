"""Command-line entry point: ``synrob <subcommand> [options]``."""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import logging
import shlex
import sys
from collections import Counter
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .formula import FAMILY_IDS, FormulaSyntaxError, parse, render
from .gateway import BackendConfig, GatewayConfigError
from .harness import CompilerMissingError, FuzzConfig
from .mutation import ExhaustionError, load_mutants
from .pipeline import Run, RunConfig, StageError, degree_summary
from .reduction import reduce_fixpoint

log = logging.getLogger("synrob")

EXIT_OK, EXIT_CONFIG, EXIT_STAGE = 0, 1, 2

# (section, key) for each flag that maps onto a config value
FLAG_KEYS = {
    "seed": ("run", "seed"),
    "out": ("run", "out"),
    "run_id": ("run", "run_id"),
    "workers": ("run", "workers"),
    "families": ("mutation", "families"),
    "per_distance": ("mutation", "per_distance"),
    "max_distance": ("mutation", "max_distance"),
    "preprocess": ("prompts", "preprocess"),
    "backend": ("gateway", "kind"),
    "model": ("gateway", "model"),
    "repeats": ("gateway", "repeats"),
    "temperature": ("gateway", "temperature"),
    "provider_seed": ("gateway", "seed"),
    "top_p": ("gateway", "top_p"),
    "fault_rate": ("gateway", "fault_rate"),
    "endpoint": ("gateway", "endpoint"),
    "api_key_env": ("gateway", "api_key_env"),
    "rpm": ("gateway", "requests_per_minute"),
    "retry_budget": ("gateway", "retry_budget"),
    "max_in_flight": ("gateway", "max_in_flight"),
    "inputs_per_program": ("harness", "inputs_per_program"),
    "input_range": ("harness", "input_range"),
    "min_magnitude": ("harness", "min_magnitude"),
    "integer_inputs": ("harness", "integer_inputs"),
    "epsilon_2dp": ("harness", "epsilon_2dp"),
    "epsilon_6dp": ("harness", "epsilon_6dp"),
    "timeout": ("harness", "timeout"),
    "trig_compare": ("harness", "trig_compare"),
    "compiler": ("harness", "compiler"),
    "suspect_policy": ("report", "suspect_policy"),
    "distance1_kinds": ("report", "distance1_kinds"),
}

_RUN_KEYS = {"seed", "out", "run_id", "workers"}
_SECTION_FIELDS = {
    "run": {f: f for f in _RUN_KEYS},
    "mutation": {"families": "families", "per_distance": "per_distance", "max_distance": "max_distance"},
    "prompts": {"preprocess": "preprocess"},
    "report": {"suspect_policy": "suspect_policy", "distance1_kinds": "distance1_kinds"},
    "gateway": {f.name: f.name for f in dataclasses.fields(BackendConfig)},
    "harness": {f.name: f.name for f in dataclasses.fields(FuzzConfig)},
}


class ConfigError(ValueError):
    pass


def _coerce(default: object, text: str, where: str) -> object:
    text = text.strip()
    try:
        if isinstance(default, bool):
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        if default is None:
            return None if text.lower() in ("", "none") else float(text)
        if where.endswith(".compiler"):
            return tuple(shlex.split(text))
        if where.endswith(".input_range"):
            lo, hi = (float(v) for v in text.replace(",", " ").split())
            return (lo, hi)
        if isinstance(default, tuple):
            return tuple(v.strip() for v in text.split(",") if v.strip())
        return text
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot read {text!r} ({exc})") from None


def _defaults() -> dict[str, dict[str, object]]:
    run = RunConfig()
    values: dict[str, dict[str, object]] = {s: {} for s in _SECTION_FIELDS}
    for section, keys in _SECTION_FIELDS.items():
        src = run.backend if section == "gateway" else run.fuzz if section == "harness" else run
        for key, attr in keys.items():
            values[section][key] = getattr(src, attr)
    return values


def _apply(values: dict, section: str, key: str, text: str, origin: str) -> None:
    if section not in values or key not in values[section]:
        raise ConfigError(f"{origin}: unknown setting {section}.{key}")
    values[section][key] = _coerce(_defaults()[section][key], text, f"{section}.{key}")


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then command-line flags."""
    values = _defaults()
    if args.config:
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(args.config, encoding="utf-8") as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}") from None
        for section in parser.sections():
            for key, text in parser.items(section):
                _apply(values, section, key, text, args.config)
    for item in args.set or ():
        name, sep, text = item.partition("=")
        section, dot, key = name.partition(".")
        if not sep or not dot:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        _apply(values, section, key, text, "--set")
    for dest, (section, key) in FLAG_KEYS.items():
        v = getattr(args, dest, None)
        if v is not None:
            values[section][key] = v
    try:
        backend = BackendConfig(**values["gateway"])
        fuzz = FuzzConfig(**values["harness"])
        return RunConfig(
            backend=backend,
            fuzz=fuzz,
            **values["run"],
            **values["mutation"],
            **values["prompts"],
            **values["report"],
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _families(text: str) -> tuple[str, ...]:
    fams = tuple(f.strip() for f in text.split(",") if f.strip())
    bad = [f for f in fams if f not in FAMILY_IDS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown families {bad}; choose from {', '.join(FAMILY_IDS)}")
    return fams


def _range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'LO,HI', got {text!r}") from None
    return lo, hi


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run")
    g.add_argument("--config", help="INI file with [run], [mutation], [prompts], [gateway], [harness], [report]")
    g.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE", help="override any config key")
    g.add_argument("--seed", type=int, help="master seed (default 0)")
    g.add_argument("--out", help="directory holding run directories (default runs)")
    g.add_argument("--run-id", help="use this run id instead of one derived from the config")
    g.add_argument("--workers", type=int, help="parallel evaluation workers (default: CPU count)")

    g = p.add_argument_group("mutation and prompts")
    g.add_argument("--families", type=_families, help=f"comma-separated subset of {','.join(FAMILY_IDS)}")
    g.add_argument("--per-distance", type=int, help="mutants sampled per distance above 1 (default 20)")
    g.add_argument("--max-distance", type=int, help="largest mutation distance (default 5)")
    g.add_argument("--preprocess", action="store_true", default=None, help="also query reduced prompts")

    g = p.add_argument_group("generator backend")
    g.add_argument("--backend", choices=("remote", "mock_oracle", "mock_faulty", "mock_sensitive"))
    g.add_argument("--model")
    g.add_argument("--repeats", type=int, help="responses per prompt (default 5)")
    g.add_argument("--temperature", type=float)
    g.add_argument("--provider-seed", type=int, help="seed sent to the backend (default 0)")
    g.add_argument("--top-p", type=float)
    g.add_argument("--fault-rate", type=float, help="wrong-program rate for mock_faulty")
    g.add_argument("--endpoint", help="chat-completion URL for the remote backend")
    g.add_argument("--api-key-env", help="environment variable with the API key (default SYNROB_API_KEY)")
    g.add_argument("--rpm", type=int, help="request-per-minute cap for the remote backend")
    g.add_argument("--retry-budget", type=int)
    g.add_argument("--max-in-flight", type=int)

    g = p.add_argument_group("harness")
    g.add_argument("--inputs-per-program", type=int, help="fuzz inputs per program (default 1000)")
    g.add_argument("--input-range", type=_range, metavar="LO,HI", help="coefficient range (default -1000,1000)")
    g.add_argument("--min-magnitude", type=float, help="smallest allowed |coefficient| (default 0.5)")
    g.add_argument("--integer-inputs", action="store_true", default=None)
    g.add_argument("--epsilon-2dp", type=float, help="tolerance for 2-decimal outputs (default 0.02)")
    g.add_argument("--epsilon-6dp", type=float, help="tolerance for 6-decimal outputs (default 0.000002)")
    g.add_argument("--timeout", type=float, help="seconds per program execution (default 2)")
    g.add_argument("--trig-compare", choices=("principal", "residual"))
    g.add_argument("--compiler", type=lambda s: tuple(shlex.split(s)), help="command template with {src} and {out}")

    g = p.add_argument_group("report")
    g.add_argument("--suspect-policy", choices=("nonequivalent", "equivalent", "exclude"))
    g.add_argument("--distance1-kinds", action="store_true", default=None, help="also tabulate kinds over distance-1 rows")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="synrob", description="Measure the syntactic robustness of code generators.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("mutate", "sample mutants and write mutants.jsonl"),
        ("prompts", "build prompts for the mutants"),
        ("generate", "query the backend for every prompt and repeat"),
        ("evaluate", "compile and fuzz every response"),
        ("report", "aggregate verdicts into CSV, JSON and plot data"),
        ("run", "all stages in order, resuming from whatever exists"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_run_flags(p)

    p = sub.add_parser("reduce", help="reduce a formula, or every mutant in a file")
    p.add_argument("formula", nargs="?", help="formula text such as 'a*x + a + b = a'")
    p.add_argument("--mutants", type=Path, help="mutant file to annotate with reduced forms")
    p.add_argument("--output", type=Path, help="write annotated mutants here instead of stdout")
    return parser


def _print_mutant_counts(records) -> None:
    counts = Counter((r.family, r.distance) for r in records)
    distances = sorted({d for _, d in counts})
    print("family     " + "".join(f"{'d' + str(d):>6}" for d in distances) + "   total")
    for fam in dict.fromkeys(r.family for r in records):
        row = [counts[(fam, d)] for d in distances]
        print(f"{fam:<11}" + "".join(f"{n:>6}" for n in row) + f"{sum(row):>8}")
    print(f"{'all':<11}" + " " * 6 * len(distances) + f"{len(records):>8}")


def cmd_reduce(args: argparse.Namespace) -> int:
    if bool(args.formula) == bool(args.mutants):
        raise ConfigError("give either a formula or --mutants, not both")
    if args.formula:
        print(render(reduce_fixpoint(parse(args.formula))))
        return EXIT_OK
    lines = []
    for rec in load_mutants(args.mutants):
        row = rec.to_json()
        row["reduced"] = render(reduce_fixpoint(rec.formula))
        lines.append(json.dumps(row) + "\n")
    if args.output:
        args.output.write_text("".join(lines), encoding="utf-8")
    else:
        sys.stdout.write("".join(lines))
    return EXIT_OK


def _resume_hint(args: argparse.Namespace, run: Run) -> str:
    return f"rerun `synrob {args.command}` with the same options (run directory {run.dir}) to retry"


def cmd_stage(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    run = Run(config)
    print(f"run directory: {run.dir}")
    status = EXIT_OK
    if args.command == "mutate":
        _print_mutant_counts(run.mutate())
    elif args.command == "prompts":
        print(f"{len(run.prompts())} prompts")
    elif args.command == "generate":
        batch = run.generate()
        print(batch.summary())
        if not batch.ok:
            print(_resume_hint(args, run), file=sys.stderr)
            status = EXIT_STAGE
    elif args.command == "evaluate":
        rows = run.evaluate()
        print(f"{len(rows)} verdicts: " + ", ".join(f"{k}={v}" for k, v in sorted(Counter(r.verdict for r in rows).items())))
    elif args.command == "report":
        print(degree_summary(run.report()))
    else:
        rep, batch = run.run_all()
        print(batch.summary())
        print(degree_summary(rep))
        if not batch.ok:
            print(_resume_hint(args, run), file=sys.stderr)
            status = EXIT_STAGE
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        if args.command == "reduce":
            return cmd_reduce(args)
        return cmd_stage(args)
    except (ConfigError, GatewayConfigError, CompilerMissingError, FormulaSyntaxError, ExhaustionError, OSError) as exc:
        print(f"synrob: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StageError as exc:
        print(f"synrob: stage failed: {exc}", file=sys.stderr)
        return EXIT_STAGE


if __name__ == "__main__":
    sys.exit(main())
