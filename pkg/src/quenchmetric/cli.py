"""Command-line front end: ``scan``, ``timeseries`` and ``crosscheck``.

Flags override the corresponding configuration keys; the configuration
grammar is documented in :mod:`quenchmetric.config` and the README.
"""

from __future__ import annotations

import argparse
import sys

from .config import ENGINES, NORMS, ConfigError, load_config
from .sweep import (
    SCAN_FIELDS,
    TIMESERIES_FIELDS,
    emit_csv,
    emit_json,
    run_crosscheck,
    run_phase_scan,
    run_time_series,
    scan_metadata,
)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="configuration file path")
    parser.add_argument("--out", help="output path (overrides [output] path)")
    parser.add_argument("--workers", type=int, help="worker processes (overrides config)")
    parser.add_argument("--engine", choices=ENGINES, help="override engine")
    parser.add_argument("--norm", choices=NORMS, help="override tensor norm")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quenchmetric",
        description="Metric scans and equilibration traces of quenched ground-state manifolds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", help="phase-diagram grid scan to CSV")
    _add_common(scan)

    series = sub.add_parser("timeseries", help="equilibration time series at one point")
    _add_common(series)
    series.add_argument(
        "--symmetry-broken",
        action="store_true",
        help="add the seeded diagonal field so the non-resonance hypothesis holds",
    )

    cross = sub.add_parser("crosscheck", help="run both engines and report max deviation")
    _add_common(cross)
    return parser


def _load(args) -> "SweepConfig":
    with open(args.config, encoding="utf-8") as fh:
        cfg = load_config(fh.read())
    return cfg.with_overrides(
        engine=args.engine,
        norm=args.norm,
        workers=args.workers,
        out_path=args.out,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.command == "scan":
        rows = run_phase_scan(cfg)
        meta = scan_metadata(cfg)
        emit_csv(rows, cfg.out_path, meta, SCAN_FIELDS)
        if cfg.json_mirror:
            emit_json(rows, cfg.out_path + ".json", meta, SCAN_FIELDS)
        print(f"wrote {len(rows)} rows to {cfg.out_path}")
        return 0

    if args.command == "timeseries":
        if cfg.engine == "ed" and cfg.n_sites > 12:
            print("error: timeseries with engine=ed needs N <= 12", file=sys.stderr)
            return 2
        rows = run_time_series(cfg, symmetry_broken=args.symmetry_broken)
        meta = scan_metadata(cfg)
        meta["direction"] = cfg.direction
        emit_csv(rows, cfg.out_path, meta, TIMESERIES_FIELDS)
        if cfg.json_mirror:
            emit_json(rows, cfg.out_path + ".json", meta, TIMESERIES_FIELDS)
        print(f"wrote {len(rows)} rows to {cfg.out_path}")
        return 0

    result = run_crosscheck(cfg)
    print(
        f"crosscheck: max relative deviation {result.max_rel_dev:.3e} "
        f"over {result.compared} comparisons ({result.skipped} points skipped)"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
