"""Table extensions: hierarchy levels coarsest-first, then fact tables.

Fact tables are produced by streaming over the Cartesian product of the
entry-level keys in lexicographic order and keeping each combination with
probability DENSITY(f). Every table draws from its own sub-stream named after
the table, so tables can be generated in any order or concurrently.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .model import DimensionSpec, FactTableSpec, SchemaModel
from .rng import KeySequence, RandomSource, StringReferential

MEASURE_LOW = 0.0
MEASURE_HIGH = 10000.0
DEFAULT_PRODUCT_CAP = 10**9
# fixed so that output does not depend on memory settings
CHUNK = 1 << 20

_MEASURE_MAX = np.nextafter(np.float32(MEASURE_HIGH), np.float32(0))


class ProductTooLarge(RuntimeError):
    def __init__(self, table: str, combinations: int, cap: int):
        self.table, self.combinations, self.cap = table, combinations, cap
        super().__init__(
            f"{table}: {combinations} key combinations exceed the cap of {cap}; "
            f"raise the cap to at least {combinations}"
        )


@dataclass
class TableExtension:
    """Rows of one table, stored column by column."""

    table_name: str
    columns: tuple[str, ...]
    data: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.columns) != len(self.data):
            raise ValueError("one array per column")
        if len({len(c) for c in self.data}) > 1:
            raise ValueError(f"{self.table_name}: ragged columns")

    def __len__(self):
        return len(self.data[0]) if self.data else 0

    def column(self, name: str) -> np.ndarray:
        return self.data[self.columns.index(name)]

    def rows(self):
        return zip(*(c.tolist() for c in self.data))


def generate_dimension(
    spec: DimensionSpec, source: RandomSource, referential: StringReferential
) -> list[TableExtension]:
    out = []
    for lv in spec.levels:
        src = source.substream(lv.table_name)
        n = lv.cardinality
        cols = [lv.primary_key]
        data = [KeySequence().take(n)]
        for name in lv.descriptors:
            cols.append(name)
            data.append(referential.picks(src, name, n))
        if lv.coarser:
            cols.append(lv.foreign_key)
            data.append(src.skewed_indices(spec.level(lv.level_index - 1).cardinality, n))
        out.append(TableExtension(lv.table_name, tuple(cols), tuple(data)))
    return out


def generate_fact_table(
    spec: FactTableSpec,
    dims: list[TableExtension],
    source: RandomSource,
    cap: int = DEFAULT_PRODUCT_CAP,
) -> TableExtension:
    """Keep each entry-key combination with probability ``spec.density``."""
    keys = [ext.data[0] for ext in dims]
    shape = tuple(len(k) for k in keys)
    total = math.prod(shape)
    if total > cap:
        raise ProductTooLarge(spec.table_name, total, cap)
    src = source.substream(spec.table_name)

    key_parts: list[list[np.ndarray]] = [[] for _ in keys]
    meas_parts = []
    for start in range(0, total, CHUNK):
        m = min(CHUNK, total - start)
        kept = np.flatnonzero(src.random(m) < spec.density) + start
        for i, idx in enumerate(np.unravel_index(kept, shape)):
            key_parts[i].append(keys[i][idx])
        meas = (src.random((kept.size, spec.nb_measures)) * MEASURE_HIGH).astype(np.float32)
        meas_parts.append(np.minimum(meas, _MEASURE_MAX))

    cols = list(spec.foreign_keys) + list(spec.measures)
    data = [np.concatenate(p) if p else np.zeros(0, np.int64) for p in key_parts]
    meas = np.concatenate(meas_parts) if meas_parts else np.zeros((0, spec.nb_measures), np.float32)
    data += [np.ascontiguousarray(meas[:, k]) for k in range(spec.nb_measures)]
    return TableExtension(spec.table_name, tuple(cols), tuple(data))


@dataclass
class Warehouse:
    schema: SchemaModel
    seed: int
    referential: StringReferential
    tables: dict[str, TableExtension] = field(default_factory=dict)

    def __getitem__(self, name: str) -> TableExtension:
        return self.tables[name]

    def row_counts(self) -> dict[str, int]:
        return {name: len(ext) for name, ext in self.tables.items()}


def data_source(seed: int) -> RandomSource:
    return RandomSource(seed, "data")


def generate_warehouse(
    schema: SchemaModel,
    seed: int,
    workers: int = 1,
    cap: int = DEFAULT_PRODUCT_CAP,
    referential: StringReferential | None = None,
) -> Warehouse:
    """Generate every table; ``workers > 1`` runs tables on a thread pool."""
    referential = referential or StringReferential.from_seed(seed)
    # sub-streams are derived from names, not shared, so each task gets its own
    src = lambda: data_source(seed)  # noqa: E731
    wh = Warehouse(schema, seed, referential)

    def run(fn, items):
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(fn, items))
        return [fn(x) for x in items]

    for exts in run(lambda d: generate_dimension(d, src(), referential), schema.dimensions):
        for ext in exts:
            wh.tables[ext.table_name] = ext

    def fact(ft):
        dims = [wh.tables[t] for t in ft.entry_tables]
        return generate_fact_table(ft, dims, src(), cap)

    for ext in run(fact, schema.fact_tables):
        wh.tables[ext.table_name] = ext
    return wh
