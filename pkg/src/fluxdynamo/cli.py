"""Command line front end: ``run`` evaluates a scenario sweep, ``report`` emits the discrepancy report.

Exit status: 0 success, 2 config error, 3 one or more cells failed numerically.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .classification import DEFAULT_TOL
from .config import FORMATS, ScenarioConfig, load_config
from .errors import ConfigError
from .output import render_csv, render_json
from .report import DEFAULT_REPORT_TOL, DiscrepancyReport, build_report
from .scenarios import SCENARIOS, evaluate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

META_COLUMNS = ("growth_rate", "growth_rate_convention", "dynamo_class", "sources", "annotations", "status")


def _run_cell(scenario: str, params: dict, tol: float) -> dict:
    try:
        res = evaluate(scenario, params, tol)
    except (ArithmeticError, ValueError, KeyError, OverflowError) as exc:
        reason = str(exc) or type(exc).__name__
        return {"status": f"error:{type(exc).__name__}: {reason}"}
    row = dict(res.outputs)
    row.update(
        growth_rate=res.gamma,
        growth_rate_convention=res.gamma_convention,
        dynamo_class=res.dynamo_class,
        sources=";".join(res.sources),
        annotations=";".join(res.annotations),
        status="ok",
    )
    return row


def run_config(config: ScenarioConfig, tol: float = DEFAULT_TOL, jobs: int = 1) -> tuple[list[str], list[dict]]:
    """Evaluate every sweep cell; rows come back in sweep order."""
    scenario = SCENARIOS[config.scenario]
    cells = [scenario.resolve(c) for c in config.cells()]
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        results = list(pool.map(lambda p: _run_cell(config.scenario, p, tol), cells))
    # growth_rate rather than gamma: some scenarios take gamma as an input parameter
    columns = ["index", "scenario", *scenario.params, *scenario.outputs, *META_COLUMNS]
    rows = [{"index": i, "scenario": config.scenario, **p, **r} for i, (p, r) in enumerate(zip(cells, results))]
    return columns, rows


def render_rows(columns, rows, fmt: str, metadata: dict | None = None) -> str:
    if fmt == "csv":
        return render_csv(list(columns), rows)
    payload = {"metadata": metadata or {}, "columns": list(columns),
               "rows": [{c: row.get(c) for c in columns} for row in rows]}
    return render_json(payload)


def render_report(report: DiscrepancyReport, fmt: str) -> str:
    return render_rows(report.COLUMNS, report.rows(), fmt, report.metadata)


def _destination(arg_output, config: ScenarioConfig, suffix: str = "") -> Path | None:
    if arg_output == "-":
        return None
    if arg_output:
        return Path(arg_output)
    if config.output is None:
        return None
    p = Path(config.output)
    if not p.is_absolute() and config.source:
        p = Path(config.source).parent / p
    if suffix:
        p = p.with_name(p.stem + suffix + p.suffix)
    return p


def _emit(text: str, dest: Path | None) -> None:
    if dest is None:
        sys.stdout.write(text)
        return
    dest.parent.mkdir(parents=True, exist_ok=True)
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fluxdynamo", description="Kinematic flux-tube dynamo scenarios.")
    ap.add_argument("command", choices=("run", "report"))
    ap.add_argument("config", help="scenario config file")
    ap.add_argument("--output", help="output path, - for stdout (default: config 'output', else stdout)")
    ap.add_argument("--format", choices=FORMATS, help="output format (default: config 'format')")
    ap.add_argument("--jobs", type=int, default=1, help="parallel sweep cells")
    ap.add_argument("--tolerance", type=float,
                    help=f"classifier tolerance for run (default {DEFAULT_TOL}), "
                         f"verdict tolerance for report (default {DEFAULT_REPORT_TOL})")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    if args.tolerance is not None and not args.tolerance > 0:
        print("error: --tolerance must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    fmt = args.format or config.format

    if args.command == "run":
        tol = DEFAULT_TOL if args.tolerance is None else args.tolerance
        columns, rows = run_config(config, tol, args.jobs)
        _emit(render_rows(columns, rows, fmt, {"scenario": config.scenario}), _destination(args.output, config))
        failed = sum(r["status"] != "ok" for r in rows)
        if failed:
            print(f"warning: {failed} of {len(rows)} cells failed", file=sys.stderr)
            return EXIT_NUMERIC
        return EXIT_OK

    tol = DEFAULT_REPORT_TOL if args.tolerance is None else args.tolerance
    try:
        report = build_report(config, tol)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ArithmeticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _emit(render_report(report, fmt), _destination(args.output, config, "_report"))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
