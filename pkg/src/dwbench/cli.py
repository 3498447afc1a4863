"""Command-line front end: estimate | generate | workload | execute | report."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import pipeline
from .config import ConfigError, RunConfig, parse_config, workload_section
from .emit import read_manifest, read_workload
from .executor import GainError, GainReport, RunAborted, connect, export_timings, load_warehouse, read_timings, run_workload
from .schema import InvalidParameters, Layout, estimate_size

log = logging.getLogger("dwbench")


def _config(args) -> RunConfig:
    text = Path(args.config).read_text() if args.config else None
    return parse_config(
        text,
        preset=args.preset,
        seed=args.seed,
        out=getattr(args, "out", None),
        fmt=getattr(args, "format", None),
        workers=getattr(args, "workers", None),
    )


def cmd_estimate(args) -> int:
    cfg = _config(args)
    low, schema = pipeline.build(cfg)
    flat = estimate_size(low, Layout.FLAT_FILE, schema)
    storage = estimate_size(low, Layout.STORAGE, schema)
    print(f"schema: {schema.kind.value}, {len(schema.table_names())} tables")
    print(f"{'table':<10} {'rows':>14} {'row bytes':>10} {'MB':>10}")
    for t in flat.tables:
        print(f"{t.name:<10} {t.rows:>14,.1f} {t.row_bytes:>10.1f} {t.bytes / 1e6:>10.3f}")
    print(f"total flat-file size: {flat.megabytes:.2f} MB")
    print(f"total with binary widths: {storage.megabytes:.2f} MB")
    return 0


def cmd_generate(args) -> int:
    cfg = _config(args)
    manifest = pipeline.generate(cfg)
    print(f"wrote {manifest['schema_kind']} warehouse to {cfg.out}")
    for name, t in manifest["tables"].items():
        print(f"  {name:<10} {t['rows']:>12,} rows")
    print(f"  workload.sql: {manifest['workload_queries']} queries")
    return 0


def cmd_workload(args) -> int:
    params = workload_section(Path(args.config).read_text()) if args.config else None
    try:
        wl = pipeline.regenerate_workload(Path(args.out), params, args.seed)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(wl)} queries to {Path(args.out) / 'workload.sql'}")
    return 0


def cmd_execute(args) -> int:
    text = Path(args.workload).read_text()
    header, entries = read_workload(text)
    if args.warehouse:
        try:
            fp = read_manifest(args.warehouse)["schema_fingerprint"]
            if header.get("schema") != fp:
                log.warning("workload schema %s does not match warehouse %s", header.get("schema"), fp)
        except FileNotFoundError:
            log.warning("no manifest in %s; skipping fingerprint check", args.warehouse)
    session = connect(args.connection)
    try:
        if args.load:
            counts = load_warehouse(session, Path(args.load))
            log.info("loaded %d tables", len(counts))
        try:
            records = run_workload(session, entries, runs=args.runs, warmup=args.warmup)
        except RunAborted as exc:
            records = exc.records
            print(f"error: {exc}", file=sys.stderr)
            _write_timings(records, args.output)
            return 3
    finally:
        session.close()
    _write_timings(records, args.output)
    failed = sum(not r.ok for r in records)
    print(f"{len(records)} timings, {failed} errors")
    return 0


def _write_timings(records, output):
    if output:
        with open(output, "w", newline="") as fh:
            export_timings(records, fh)
    else:
        sys.stdout.write(export_timings(records))


def cmd_report(args) -> int:
    configs = {Path(args.reference).stem: read_timings(args.reference)}
    for path in args.candidate:
        configs[Path(path).stem] = read_timings(path)
    try:
        report = GainReport.build(configs, Path(args.reference).stem)
    except GainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(report.render_text(), end="")
    if args.csv:
        Path(args.csv).write_text(report.render_csv())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dwbench", description="Synthetic data warehouse benchmark generator.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def warehouse_opts(p):
        p.add_argument("--config", help="INI file with [high], [low] or [preset], [workload], [run]")
        p.add_argument("--preset", choices=["dw1", "dw2", "dw3"])
        p.add_argument("--seed", type=int)

    p = sub.add_parser("estimate", help="print the expected warehouse size without generating")
    warehouse_opts(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("generate", help="generate schema, data, workload and manifest")
    warehouse_opts(p)
    p.add_argument("--out")
    p.add_argument("--format", choices=["dat", "sql"])
    p.add_argument("--workers", type=int, help="tables generated and written concurrently")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("workload", help="regenerate workload.sql for a generated warehouse")
    p.add_argument("--out", required=True, help="directory holding the manifest")
    p.add_argument("--config", help="file whose [workload] section overrides the manifest")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_workload)

    p = sub.add_parser("execute", help="run a workload and export per-query timings")
    p.add_argument("--connection", required=True, help="engine:target, e.g. duckdb:dw1.duckdb or sqlite:dw.db")
    p.add_argument("--workload", required=True)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--warmup", type=int, default=0)
    p.add_argument("--load", help="generated directory to create and load before running")
    p.add_argument("--warehouse", help="generated directory whose fingerprint the workload should match")
    p.add_argument("--output", help="timing CSV path (stdout if omitted)")
    p.set_defaults(func=cmd_execute)

    p = sub.add_parser("report", help="gain of candidate timing files against a reference")
    p.add_argument("--reference", required=True)
    p.add_argument("--candidate", required=True, action="append")
    p.add_argument("--csv", help="also write the machine-readable report here")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InvalidParameters as exc:
        print("invalid parameters:", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
