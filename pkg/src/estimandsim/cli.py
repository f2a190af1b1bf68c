"""Command line entry point: ``estimandsim simulate|oracle|check|decompose``.

Exit codes: 0 success (and a causal or unassessed verdict from ``check``),
1 usage or config error, 2 runtime failure, 3 non-causal verdict.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .checker import VerdictStatus, check_estimand
from .configio import load_estimand, load_scenario, scenario_to_dict
from .dgm import generate_cohort
from .engine import reps_to_csv, run_simulation, summary_to_json
from .errors import ConfigError, EstimandSimError, ValidationError
from .model import UINT64_MAX, ScenarioConfig, validate_scenario
from .oracle import summarize_population
from .outcomes import decomposition_report
from .presets import PRESETS, get_preset

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME, EXIT_NON_CAUSAL = 0, 1, 2, 3

log = logging.getLogger("estimandsim")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _uint64(text: str) -> int:
    value = int(text)
    if not 0 <= value <= UINT64_MAX:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="estimandsim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def scenario_source(p):
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--config", type=Path, help="scenario JSON file")
        group.add_argument("--preset", choices=sorted(PRESETS), help="named scenario")

    p = sub.add_parser("simulate", help="run the Monte Carlo study")
    scenario_source(p)
    p.add_argument("--seed", type=_uint64, help="override the master seed")
    p.add_argument("--reps", type=_positive, help="override n_reps")
    p.add_argument("--out", type=Path, help="directory for reps.csv, summary.json, manifest.json")
    p.add_argument("--format", choices=("csv", "json", "table"), default="table")
    p.add_argument("--workers", type=_positive, help="process count (default: CPU count, capped by env)")

    p = sub.add_parser("oracle", help="exact population quantities")
    scenario_source(p)
    p.add_argument("--format", choices=("json", "table"), default="json")

    p = sub.add_parser("check", help="lint an estimand definition")
    p.add_argument("--estimand", type=Path, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("decompose", help="component decomposition on a simulated cohort")
    scenario_source(p)
    p.add_argument("--cohort-size", type=_positive, default=100_000)
    p.add_argument("--seed", type=_uint64)
    return parser


def _load(args) -> tuple[ScenarioConfig, Optional[str]]:
    if args.preset:
        return get_preset(args.preset), args.preset
    return load_scenario(args.config), None


def format_table(title: str, rows: Sequence[tuple[str, float, Optional[float]]]) -> str:
    """Plain-text table. Numbers use ``repr`` so they round-trip exactly."""
    width = max(len(name) for name, _, _ in rows) + 2
    lines = [title, f"{'measure':<{width}}{'estimate':<26}mcse"]
    for name, value, err in rows:
        lines.append(f"{name:<{width}}{value!r:<26}{'' if err is None else repr(err)}")
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> dict[str, tuple[float, Optional[float]]]:
    out = {}
    for line in text.splitlines()[2:]:
        parts = line.split()
        if len(parts) >= 2:
            out[parts[0]] = (float(parts[1]), float(parts[2]) if len(parts) > 2 else None)
    return out


def _simulate(args) -> int:
    config, preset = _load(args)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.reps is not None:
        config = replace(config, n_reps=args.reps)
    validate_scenario(config)
    results, summary = run_simulation(config, preset=preset, workers=args.workers)

    csv_text = reps_to_csv(results)
    json_text = summary_to_json(summary, config)
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        paths = {name: args.out / name for name in ("reps.csv", "summary.json", "manifest.json")}
        paths["reps.csv"].write_text(csv_text)
        paths["summary.json"].write_text(json_text)
        manifest = {
            "artifact_version": __version__,
            "preset": preset,
            "seed": config.seed,
            "config": scenario_to_dict(config),
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "outputs": {k: str(v) for k, v in paths.items()},
        }
        paths["manifest.json"].write_text(json.dumps(manifest, indent=2) + "\n")

    if args.format == "csv":
        sys.stdout.write(csv_text)
    elif args.format == "json":
        sys.stdout.write(json_text)
    else:
        s = summary
        title = f"preset={preset or '-'} seed={config.seed} n_reps={s.n_reps}"
        sys.stdout.write(format_table(title, [
            ("mean_rd", s.mean_rd, s.mcse_rd),
            ("rejection_fraction", s.rejection_fraction, s.mcse_rej),
            ("mean_excess", s.mean_excess, s.mcse_excess),
        ]))
    return EXIT_OK


def _oracle(args) -> int:
    config, preset = _load(args)
    summary = summarize_population(validate_scenario(config))
    if args.format == "json":
        doc = {"preset": preset, "config": scenario_to_dict(config), "oracle": summary.to_dict()}
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        rows = [(k, float(v), None) for k, v in summary.to_dict().items()]
        sys.stdout.write(format_table(f"oracle preset={preset or '-'}", rows))
    return EXIT_OK


def _check(args) -> int:
    spec = load_estimand(args.estimand)
    verdict = check_estimand(spec)
    if args.format == "json":
        sys.stdout.write(json.dumps(verdict.to_dict(), indent=2) + "\n")
    else:
        name = spec.name or str(args.estimand)
        lines = [f"{name}: {verdict.status.value.upper().replace('_', '-')}"]
        lines += [f"  - {m}" for m in verdict.messages]
        lines.append("outcome definitions by arm:")
        labels = {a.id: a.label for a in spec.arms}
        lines += [f"  {labels[arm]}: {text}" for arm, text in verdict.rendered_definitions.items()]
        sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_NON_CAUSAL if verdict.status is VerdictStatus.NON_CAUSAL else EXIT_OK


def _decompose(args) -> int:
    config, preset = _load(args)
    validate_scenario(config)
    seed = config.seed if args.seed is None else args.seed
    cohort = generate_cohort(replace(config, n=args.cohort_size), seed)
    report = decomposition_report(cohort)
    doc = {"preset": preset, "cohort_size": args.cohort_size, "seed": seed, **report.to_dict()}
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


_COMMANDS = {"simulate": _simulate, "oracle": _oracle, "check": _check, "decompose": _decompose}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EstimandSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001 - top-level guard
        log.debug("unhandled failure", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
