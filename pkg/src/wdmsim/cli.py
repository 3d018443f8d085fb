"""Command-line front end: single runs, sweep experiments, config validation.

Artifacts land under ``--out``: ``summary.csv`` (one aggregate row per
router and sweep value), ``runs.csv`` (one row per individual run when
sweeping), and ``timeseries_<run-id>.csv`` per run.  Outputs are
byte-identical across repeat invocations, including with parallel workers.
"""

from __future__ import annotations

import argparse
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from . import metrics as metrics_mod
from .config import (
    SWEEP_NONE,
    Diagnostic,
    Scenario,
    _ROUTER_ALIASES,
    parse_config,
    validate_scenario,
)
from .engine import run
from .errors import SimError


@dataclass
class RunOutcome:
    router: str
    sweep_value: float | None
    seed: int
    label: str
    report: metrics_mod.MetricsReport


@dataclass
class ScenarioResult:
    runs: list[RunOutcome]
    aggregate_rows: list[dict]
    out_dir: Path


def _sanitize(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", label)


def _execute(scenario: Scenario, router: str, sweep_value, seed: int) -> RunOutcome:
    config = scenario.config_for(router, sweep_value, seed)
    report = run(config)
    report.scenario = scenario.run_label(router, sweep_value, seed)
    return RunOutcome(router, sweep_value, seed, report.scenario, report)


def _aggregate(scenario: Scenario, router: str, sweep_value, outcomes: list[RunOutcome]) -> dict:
    """Mean of every numeric metric across seeds, in sorted-seed order."""
    rows = [metrics_mod.summary_row(o.report) for o in outcomes]
    n = len(rows)
    agg = dict(rows[0])
    agg["scenario"] = scenario.run_label(router, sweep_value)
    agg["seed"] = ""
    agg["n_seeds"] = n
    for key in rows[0]:
        if key in ("scenario", "router", "seed", "n_seeds"):
            continue
        values = [row[key] for row in rows]
        agg[key] = sum(values) / n
    return agg


def run_scenario(scenario: Scenario, out_dir, workers: int = 1) -> ScenarioResult:
    """One run per (router, sweep value, seed); write all CSV artifacts."""
    out_dir = Path(out_dir)
    sweep_values = scenario.sweep_values if scenario.sweep_param != SWEEP_NONE else [None]
    jobs = [
        (router, value, seed)
        for router in scenario.routers()
        for value in sweep_values
        for seed in scenario.seeds
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda j: _execute(scenario, *j), jobs))
    else:
        outcomes = [_execute(scenario, *job) for job in jobs]
    outcomes.sort(key=lambda o: (o.router, o.sweep_value if o.sweep_value is not None else 0, o.seed))

    aggregate_rows = []
    for router in scenario.routers():
        for value in sweep_values:
            group = [o for o in outcomes if o.router == router and o.sweep_value == value]
            aggregate_rows.append(_aggregate(scenario, router, value, group))

    out_dir.mkdir(parents=True, exist_ok=True)
    for outcome in outcomes:
        metrics_mod.write_timeseries_csv(
            outcome.report, out_dir / f"timeseries_{_sanitize(outcome.label)}.csv"
        )
    if len(jobs) > 1:
        metrics_mod.write_summary_csv(
            [metrics_mod.summary_row(o.report) for o in outcomes], out_dir / "runs.csv"
        )
        metrics_mod.write_summary_csv(aggregate_rows, out_dir / "summary.csv")
    else:
        metrics_mod.write_summary_csv(
            [metrics_mod.summary_row(outcomes[0].report)], out_dir / "summary.csv"
        )
    return ScenarioResult(runs=outcomes, aggregate_rows=aggregate_rows, out_dir=out_dir)


def _load_scenario(args) -> Scenario:
    if args.config:
        text = Path(args.config).read_text(encoding="utf-8")
    else:
        text = ""
    scenario = parse_config(text)
    if args.topology:
        scenario.base = replace(scenario.base, topology_file=args.topology)
    if args.router:
        alias = _ROUTER_ALIASES.get(args.router)
        if alias is None:
            raise SimError(f"unknown router {args.router!r}")
        scenario.router = alias
        if alias != "both":
            scenario.base = replace(scenario.base, router=alias)
    if args.seed:
        scenario.seeds = list(args.seed)
    return scenario


def _print_diagnostics(diagnostics: list[Diagnostic]) -> int:
    if not diagnostics:
        print("valid")
        return 0
    for diag in diagnostics:
        print(f"{diag.severity}: {diag.message}")
    return 1 if any(d.severity == "error" for d in diagnostics) else 0


def _cmd_run(args) -> int:
    scenario = _load_scenario(args)
    if len(scenario.seeds) != 1:
        print("error: run takes exactly one seed; use sweep for multi-seed experiments",
              file=sys.stderr)
        return 2
    scenario.sweep_param = SWEEP_NONE
    scenario.sweep_values = []
    if scenario.router == "both":
        print("error: run takes a single router; use sweep to compare", file=sys.stderr)
        return 2
    result = run_scenario(scenario, args.out, workers=1)
    report = result.runs[0].report
    print(f"{report.scenario}: offered={report.offered} accepted={report.accepted} "
          f"blocked={report.blocked} restored={report.restored} dropped={report.dropped} "
          f"blocking_probability={report.blocking_probability:.4f}")
    print(f"artifacts in {result.out_dir}")
    return 0


def _cmd_sweep(args) -> int:
    scenario = _load_scenario(args)
    result = run_scenario(scenario, args.out, workers=args.workers)
    print(f"{len(result.runs)} runs, {len(result.aggregate_rows)} aggregate rows "
          f"-> {result.out_dir / 'summary.csv'}")
    return 0


def _cmd_validate(args) -> int:
    try:
        scenario = _load_scenario(args)
    except SimError as err:
        print(f"error: {err}")
        return 1
    return _print_diagnostics(validate_scenario(scenario))


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wdmsim",
        description="Discrete-event simulator for fault-tolerant WDM lightpath routing",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, handler in (("run", _cmd_run), ("sweep", _cmd_sweep), ("validate", _cmd_validate)):
        p = sub.add_parser(name)
        p.add_argument("--config", help="scenario file (key = value lines)")
        p.add_argument("--topology", help="topology file overriding the config/default")
        p.add_argument("--out", default="out", help="output directory for CSV artifacts")
        p.add_argument("--seed", type=int, action="append", help="seed (repeatable)")
        p.add_argument("--router", choices=["rftr", "baseline", "both"], help="router selection")
        p.set_defaults(handler=handler)
    sub.choices["sweep"].add_argument("--workers", type=int, default=1,
                                      help="parallel run workers (output-identical)")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.handler(args)
    except SimError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
