"""Generate a preset warehouse, run its workload on DuckDB under two physical
configurations and report the gain of the second over the first.

IC0 is the bare schema; IC1 adds an index on every fact-table foreign key.
A scale of 1 is the full preset; smaller values shrink every dimension.

Usage: python scripts/run_preset_benchmark.py --preset dw1 --scale 4 --runs 3
"""

import argparse
import logging
import tempfile
from pathlib import Path

from dwbench.config import RunConfig
from dwbench.emit import read_workload
from dwbench.executor import GainReport, connect, export_timings, load_warehouse, run_workload
from dwbench.model import AttributeKind
from dwbench.pipeline import build, generate
from dwbench.presets import PRESET_WORKLOAD, PRESETS, scaled


def fk_indexes(schema):
    for ft in schema.fact_tables:
        for a in ft.attributes:
            if a.kind is AttributeKind.FOREIGN_KEY:
                yield f"CREATE INDEX IX_{ft.table_name}_{a.name} ON {ft.table_name} ({a.name})"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", choices=sorted(PRESETS), default="dw1")
    ap.add_argument("--scale", type=int, default=0, help="HHLEVEL_SIZE and DIM_SFACTOR override; 0 keeps the preset")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--runs", type=int, default=3)
    ap.add_argument("--warmup", type=int, default=1)
    ap.add_argument("--out", type=Path, help="keep the warehouse and timing files here")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    low = PRESETS[args.preset]
    if args.scale:
        low = scaled(low, args.scale, args.scale)
    out = args.out or Path(tempfile.mkdtemp(prefix=f"{args.preset}-"))
    cfg = RunConfig(low=low, preset=args.preset, workload=PRESET_WORKLOAD, seed=args.seed, out=out, workers=4)
    manifest = generate(cfg)
    _, schema = build(cfg)
    logging.info("generated %s rows in %s", f"{sum(t['rows'] for t in manifest['tables'].values()):,}", out)

    _, entries = read_workload((out / "workload.sql").read_text())
    timings = {}
    for name, extra in (("IC0", []), ("IC1", list(fk_indexes(schema)))):
        session = connect("duckdb")
        load_warehouse(session, out)
        for stmt in extra:
            session.execute(stmt)
        timings[name] = run_workload(session, entries, runs=args.runs, warmup=args.warmup)
        session.close()
        with open(out / f"timings_{name}.csv", "w", newline="") as fh:
            export_timings(timings[name], fh)
    print(GainReport.build(timings, "IC0").render_text())


if __name__ == "__main__":
    main()
