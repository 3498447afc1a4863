import csv
import math
from pathlib import Path

import pytest

from dwbench.executor import TimingRecord
from dwbench.model import HighLevelParams, LowLevelParams
from dwbench.presets import DW1, scaled
from dwbench.schema import build_schema, derive_low_level, schema_source
from dwbench.rng import RandomSource

DATA = Path(__file__).parent / "data"


def reference_timings(name: str) -> dict[str, list[TimingRecord]]:
    """Per-configuration timing records from one of the data/*_timings.csv files."""
    with open(DATA / name, newline="") as fh:
        rows = list(csv.DictReader(fh))
    configs = [c for c in rows[0] if c != "query"]
    return {c: [TimingRecord(r["query"], 1, int(r[c])) for r in rows] for c in configs}


SMALL_HIGH = HighLevelParams(
    avg_nb_ft=2,
    avg_nb_dim=3,
    avg_tot_nb_dim=4,
    avg_nb_meas=3,
    avg_density=0.5,
    avg_nb_levels=2,
    avg_nb_att=3,
    avg_hhlevel_size=3,
    dim_sfactor=2,
)


def small_low(seed: int, max_combinations: int = 20_000) -> LowLevelParams:
    """Randomised small parameter set; constellations and snowflakes both occur.

    Draws are repeated on the same stream until every fact table is small.
    """
    src = RandomSource(seed, "parameters")
    while True:
        low = derive_low_level(SMALL_HIGH, src, spread_ratio=0.4)
        entry = sorted((low.level_cardinalities(d)[-1] for d in range(low.tot_nb_dim)), reverse=True)
        if all(math.prod(entry[:n]) <= max_combinations for n in low.nb_dim):
            return low


@pytest.fixture
def dw1_small():
    low = scaled(DW1, 3, 3)
    return low, build_schema(low, schema_source(0))


# criterion number -> (title, passed, detail), filled by test_acceptance
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}  [{detail}]")
