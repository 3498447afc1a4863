"""Recompute the gain line of the three reference index-configuration timing sets.

Usage: python scripts/reproduce_gain_tables.py [--csv-dir DIR]
"""

import argparse
import csv
from pathlib import Path

from dwbench.executor import GainReport, TimingRecord

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"


def load(path: Path) -> dict[str, list[TimingRecord]]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    configs = [c for c in rows[0] if c != "query"]
    return {c: [TimingRecord(r["query"], 1, int(r[c])) for r in rows] for c in configs}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--csv-dir", type=Path, help="also write one report CSV per warehouse here")
    args = ap.parse_args()
    for path in sorted(DATA.glob("dw*_timings.csv")):
        report = GainReport.build(load(path), "IC0")
        name = path.stem.split("_")[0].upper()
        print(f"== {name} (ms, reference IC0)")
        print(report.render_text())
        if args.csv_dir:
            args.csv_dir.mkdir(parents=True, exist_ok=True)
            (args.csv_dir / f"{path.stem}_gain.csv").write_text(report.render_csv())


if __name__ == "__main__":
    main()
