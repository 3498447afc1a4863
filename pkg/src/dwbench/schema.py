"""From parameters to schema: derivation, instantiation and size estimation."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .model import (
    DimensionSpec,
    FactTableSpec,
    HierarchyLevelSpec,
    HighLevelParams,
    LowLevelParams,
    SchemaModel,
    fact_table_name,
    level_table_name,
    validate_low_level,
)
from .rng import DEFAULT_SPREAD_RATIO, RandomSource, skewed_index_pmf

MIN_DENSITY = 0.01
MEGABYTE = 10**6


class InvalidParameters(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


def derive_low_level(
    high: HighLevelParams, source: RandomSource, spread_ratio: float = DEFAULT_SPREAD_RATIO
) -> LowLevelParams:
    """Draw a full low-level parameter set around the averages in ``high``.

    TOT_NB_DIM is clamped into [max NB_DIM(f), Σ NB_DIM(f)] so the result
    always validates.
    """
    g = lambda mean: source.gaussian_int(mean, spread_ratio)  # noqa: E731

    nb_ft = g(high.avg_nb_ft)
    nb_dim, nb_meas, density = [], [], []
    for _ in range(nb_ft):
        nb_dim.append(g(high.avg_nb_dim))
        nb_meas.append(g(high.avg_nb_meas))
        dens = source.gaussian(high.avg_density, spread_ratio * high.avg_density)
        density.append(round(min(1.0, max(MIN_DENSITY, dens)), 4))

    tot = g(high.avg_tot_nb_dim)
    tot = min(max(tot, max(nb_dim)), sum(nb_dim))

    nb_levels, nb_att, hh, sf = [], [], [], []
    for _ in range(tot):
        levels = g(high.avg_nb_levels)
        nb_levels.append(levels)
        nb_att.append(tuple(g(high.avg_nb_att) for _ in range(levels)))
        hh.append(g(high.avg_hhlevel_size))
        factor = g(high.dim_sfactor)
        sf.append(factor if levels > 1 else None)

    return LowLevelParams(
        nb_ft=nb_ft,
        nb_dim=tuple(nb_dim),
        tot_nb_dim=tot,
        nb_meas=tuple(nb_meas),
        density=tuple(density),
        nb_levels=tuple(nb_levels),
        nb_att=tuple(nb_att),
        hhlevel_size=tuple(hh),
        dim_sfactor=tuple(sf),
    )


def build_dimensions(low: LowLevelParams) -> tuple[DimensionSpec, ...]:
    dims = []
    for d in range(low.tot_nb_dim):
        cards = low.level_cardinalities(d)
        names = [level_table_name(d + 1, h) for h in range(1, len(cards) + 1)]
        levels = tuple(
            HierarchyLevelSpec(
                dimension_index=d + 1,
                level_index=h + 1,
                table_name=names[h],
                nb_descriptors=low.nb_att[d][h],
                cardinality=cards[h],
                coarser=names[h - 1] if h > 0 else None,
                finer=names[h + 1] if h + 1 < len(names) else None,
            )
            for h in range(len(cards))
        )
        dims.append(DimensionSpec(d + 1, levels))
    return tuple(dims)


def build_schema(low: LowLevelParams, source: RandomSource) -> SchemaModel:
    """Instantiate dimensions, then fact tables.

    Each fact table draws its dimensions by skewed choice without
    replacement from the global pool; the chosen set is stored in
    ascending index order.
    """
    problems = validate_low_level(low)
    if problems:
        raise InvalidParameters(problems)
    dims = build_dimensions(low)
    facts = []
    for f in range(low.nb_ft):
        pool = list(range(1, low.tot_nb_dim + 1))
        refs = [pool.pop(source.skewed_index(len(pool)) - 1) for _ in range(low.nb_dim[f])]
        refs.sort()
        facts.append(
            FactTableSpec(
                index=f + 1,
                table_name=fact_table_name(f + 1),
                dimension_refs=tuple(refs),
                entry_tables=tuple(dims[d - 1].entry_level.table_name for d in refs),
                nb_measures=low.nb_meas[f],
                density=low.density[f],
            )
        )
    return SchemaModel(tuple(facts), dims)


def schema_source(seed: int) -> RandomSource:
    return RandomSource(seed, "schema")


# size estimation


class Layout(str, enum.Enum):
    """How row widths are counted.

    FLAT_FILE models the "|"-delimited text files the emitter writes.
    STORAGE uses fixed binary widths: 4-byte keys and measures, descriptors
    of prefix length + 21 bytes.
    """

    FLAT_FILE = "flat"
    STORAGE = "storage"


# mean length of f"{x:.6g}" for x uniform on [0, 10000)
MEASURE_TEXT_BYTES = 6.88
DESCRIPTOR_SUFFIX_BYTES = 21
BINARY_KEY_BYTES = 4
BINARY_MEASURE_BYTES = 4


@dataclass(frozen=True)
class TableEstimate:
    name: str
    rows: float
    row_bytes: float

    @property
    def bytes(self) -> float:
        return self.rows * self.row_bytes


@dataclass(frozen=True)
class SizeEstimate:
    layout: Layout
    tables: tuple[TableEstimate, ...]

    @property
    def total_bytes(self) -> float:
        return sum(t.bytes for t in self.tables)

    @property
    def megabytes(self) -> float:
        return self.total_bytes / MEGABYTE

    def table(self, name: str) -> TableEstimate:
        return next(t for t in self.tables if t.name == name)


def mean_digits(n: int) -> float:
    """Mean decimal length of the integers 1..n."""
    total, lo, width = 0, 1, 1
    while lo <= n:
        hi = min(n, lo * 10 - 1)
        total += (hi - lo + 1) * width
        lo, width = lo * 10, width + 1
    return total / n


def skewed_mean_digits(n: int) -> float:
    pmf = skewed_index_pmf(n)
    widths = np.array([len(str(k)) for k in range(1, n + 1)])
    return float(pmf @ widths)


def estimate_size(
    low: LowLevelParams, layout: Layout = Layout.FLAT_FILE, schema: SchemaModel | None = None
) -> SizeEstimate:
    """Expected data volume before anything is generated.

    Fact row counts are expectations: DENSITY(f) times the product of the
    entry-level cardinalities. Without ``schema`` the fact-to-dimension
    assignment is unknown; when a fact table references fewer dimensions
    than exist, its NB_DIM(f) largest entry levels are used (an upper bound).
    """
    problems = validate_low_level(low)
    if problems:
        raise InvalidParameters(problems)
    flat = layout is Layout.FLAT_FILE
    dims = schema.dimensions if schema is not None else build_dimensions(low)
    tables = []
    for dim in dims:
        for lv in dim.levels:
            descr = sum(len(name) + DESCRIPTOR_SUFFIX_BYTES for name in lv.descriptors)
            if flat:
                width = mean_digits(lv.cardinality) + descr
                if lv.coarser:
                    width += skewed_mean_digits(dim.level(lv.level_index - 1).cardinality)
                width += len(lv.attributes)  # separators plus newline
            else:
                width = BINARY_KEY_BYTES * (2 if lv.coarser else 1) + descr
            tables.append(TableEstimate(lv.table_name, float(lv.cardinality), width))

    for f in range(low.nb_ft):
        if schema is not None:
            ft = schema.fact_tables[f]
            cards = [schema.dimension(d).entry_level.cardinality for d in ft.dimension_refs]
        else:
            cards = sorted((d.entry_level.cardinality for d in dims), reverse=True)[: low.nb_dim[f]]
        combos = math.prod(cards)
        if combos > 2**63:
            raise OverflowError(f"{fact_table_name(f + 1)}: {combos} key combinations overflow the estimate")
        rows = low.density[f] * combos
        if flat:
            width = sum(mean_digits(c) for c in cards)
            width += MEASURE_TEXT_BYTES * low.nb_meas[f] + len(cards) + low.nb_meas[f]
        else:
            width = BINARY_KEY_BYTES * len(cards) + BINARY_MEASURE_BYTES * low.nb_meas[f]
        tables.append(TableEstimate(fact_table_name(f + 1), rows, width))
    return SizeEstimate(layout, tuple(tables))
