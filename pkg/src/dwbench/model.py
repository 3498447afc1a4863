"""Warehouse metamodel: table intentions, parameter sets and validation."""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import asdict, dataclass, fields
from typing import NamedTuple


class AttributeKind(str, enum.Enum):
    PRIMARY_KEY = "primary-key"
    FOREIGN_KEY = "foreign-key"
    DESCRIPTOR = "descriptor"
    MEASURE = "measure"


@dataclass(frozen=True)
class Attribute:
    name: str
    kind: AttributeKind
    referenced_table: str | None = None

    def __post_init__(self):
        if (self.kind is AttributeKind.FOREIGN_KEY) != (self.referenced_table is not None):
            raise ValueError(f"{self.name}: referenced_table is set iff kind is foreign-key")


def fact_table_name(f: int) -> str:
    return f"FT{f}"


def level_table_name(d: int, h: int) -> str:
    return f"DIM{d}_{h}"


def pk_name(table: str) -> str:
    return f"{table}_PK"


@dataclass(frozen=True)
class HierarchyLevelSpec:
    """One relational table of a dimension hierarchy.

    ``level_index`` 1 is the coarsest level. ``coarser``/``finer`` hold the
    table names of the neighbouring levels.
    """

    dimension_index: int
    level_index: int
    table_name: str
    nb_descriptors: int
    cardinality: int
    coarser: str | None = None
    finer: str | None = None

    @property
    def primary_key(self) -> str:
        return pk_name(self.table_name)

    @property
    def foreign_key(self) -> str | None:
        return pk_name(self.coarser) if self.coarser else None

    @property
    def descriptors(self) -> tuple[str, ...]:
        return tuple(f"{self.table_name}_DESCR{k}" for k in range(1, self.nb_descriptors + 1))

    @property
    def attributes(self) -> tuple[Attribute, ...]:
        attrs = [Attribute(self.primary_key, AttributeKind.PRIMARY_KEY)]
        attrs += [Attribute(name, AttributeKind.DESCRIPTOR) for name in self.descriptors]
        if self.coarser:
            attrs.append(Attribute(self.foreign_key, AttributeKind.FOREIGN_KEY, self.coarser))
        return tuple(attrs)


@dataclass(frozen=True)
class DimensionSpec:
    index: int
    levels: tuple[HierarchyLevelSpec, ...]

    def __post_init__(self):
        if not self.levels:
            raise ValueError(f"dimension {self.index} has no levels")

    @property
    def entry_level(self) -> HierarchyLevelSpec:
        """Finest level; the one fact tables reference."""
        return self.levels[-1]

    def level(self, level_index: int) -> HierarchyLevelSpec:
        return self.levels[level_index - 1]


@dataclass(frozen=True)
class FactTableSpec:
    index: int
    table_name: str
    dimension_refs: tuple[int, ...]
    entry_tables: tuple[str, ...]
    nb_measures: int
    density: float

    def __post_init__(self):
        if len(set(self.dimension_refs)) != len(self.dimension_refs):
            raise ValueError(f"{self.table_name}: duplicate dimension reference")
        if len(self.entry_tables) != len(self.dimension_refs):
            raise ValueError(f"{self.table_name}: one entry table per dimension reference")

    @property
    def foreign_keys(self) -> tuple[str, ...]:
        return tuple(pk_name(t) for t in self.entry_tables)

    @property
    def measures(self) -> tuple[str, ...]:
        return tuple(f"{self.table_name}_MEAS{k}" for k in range(1, self.nb_measures + 1))

    @property
    def attributes(self) -> tuple[Attribute, ...]:
        attrs = [
            Attribute(fk, AttributeKind.FOREIGN_KEY, table)
            for fk, table in zip(self.foreign_keys, self.entry_tables)
        ]
        attrs += [Attribute(m, AttributeKind.MEASURE) for m in self.measures]
        return tuple(attrs)


class SchemaKind(str, enum.Enum):
    STAR = "star"
    SNOWFLAKE = "snowflake"
    CONSTELLATION = "constellation"


@dataclass(frozen=True)
class SchemaModel:
    fact_tables: tuple[FactTableSpec, ...]
    dimensions: tuple[DimensionSpec, ...]

    def __post_init__(self):
        known = {d.index for d in self.dimensions}
        for ft in self.fact_tables:
            missing = set(ft.dimension_refs) - known
            if missing:
                raise ValueError(f"{ft.table_name} references unknown dimensions {sorted(missing)}")

    def dimension(self, index: int) -> DimensionSpec:
        for dim in self.dimensions:
            if dim.index == index:
                return dim
        raise KeyError(index)

    @property
    def levels(self) -> tuple[HierarchyLevelSpec, ...]:
        return tuple(level for dim in self.dimensions for level in dim.levels)

    def table_names(self) -> list[str]:
        """All tables, referenced tables before referencing ones."""
        return [lv.table_name for lv in self.levels] + [ft.table_name for ft in self.fact_tables]

    def attributes(self, table: str) -> tuple[Attribute, ...]:
        for lv in self.levels:
            if lv.table_name == table:
                return lv.attributes
        for ft in self.fact_tables:
            if ft.table_name == table:
                return ft.attributes
        raise KeyError(table)

    def shared_dimensions(self) -> set[int]:
        seen: dict[int, int] = {}
        for ft in self.fact_tables:
            for d in ft.dimension_refs:
                seen[d] = seen.get(d, 0) + 1
        return {d for d, n in seen.items() if n >= 2}

    @property
    def kind(self) -> SchemaKind:
        if len(self.fact_tables) > 1:
            return SchemaKind.CONSTELLATION
        if any(len(d.levels) > 1 for d in self.dimensions):
            return SchemaKind.SNOWFLAKE
        return SchemaKind.STAR

    def fingerprint(self) -> str:
        """Short stable hash of the table intentions and cardinalities."""
        doc = {
            "dimensions": [
                [[lv.table_name, lv.cardinality, [a.name for a in lv.attributes]] for lv in d.levels]
                for d in self.dimensions
            ],
            "facts": [
                [ft.table_name, list(ft.dimension_refs), ft.density, [a.name for a in ft.attributes]]
                for ft in self.fact_tables
            ],
        }
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class LowLevelParams:
    """Full warehouse description: one entry per fact table / dimension / level.

    ``nb_att[d][h]`` is indexed coarsest level first. ``dim_sfactor[d]`` is
    None for single-level dimensions, where it does not apply.
    """

    nb_ft: int
    nb_dim: tuple[int, ...]
    tot_nb_dim: int
    nb_meas: tuple[int, ...]
    density: tuple[float, ...]
    nb_levels: tuple[int, ...]
    nb_att: tuple[tuple[int, ...], ...]
    hhlevel_size: tuple[int, ...]
    dim_sfactor: tuple[int | None, ...]

    def level_cardinalities(self, d: int) -> list[int]:
        """Row counts of dimension ``d`` (0-based), coarsest level first."""
        size = self.hhlevel_size[d]
        factor = self.dim_sfactor[d] or 1
        out = []
        for _ in range(self.nb_levels[d]):
            out.append(size)
            size *= factor
        return out

    def to_dict(self) -> dict:
        def plain(v):
            return [plain(x) for x in v] if isinstance(v, tuple) else v

        return {k: plain(v) for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, doc: dict) -> "LowLevelParams":
        return cls(
            nb_ft=int(doc["nb_ft"]),
            nb_dim=tuple(doc["nb_dim"]),
            tot_nb_dim=int(doc["tot_nb_dim"]),
            nb_meas=tuple(doc["nb_meas"]),
            density=tuple(float(x) for x in doc["density"]),
            nb_levels=tuple(doc["nb_levels"]),
            nb_att=tuple(tuple(a) for a in doc["nb_att"]),
            hhlevel_size=tuple(doc["hhlevel_size"]),
            dim_sfactor=tuple(doc["dim_sfactor"]),
        )


def _check_positive(params, names):
    for f in fields(params):
        if f.name in names and not getattr(params, f.name) > 0:
            raise ValueError(f"{f.name.upper()} must be positive, got {getattr(params, f.name)}")


@dataclass(frozen=True)
class HighLevelParams:
    """Averages from which the low-level parameters are drawn."""

    avg_nb_ft: float = 1
    avg_nb_dim: float = 5
    avg_tot_nb_dim: float = 5
    avg_nb_meas: float = 5
    avg_density: float = 0.6
    avg_nb_levels: float = 3
    avg_nb_att: float = 5
    avg_hhlevel_size: float = 10
    dim_sfactor: float = 10

    def __post_init__(self):
        _check_positive(self, {f.name for f in fields(self)})
        if self.avg_density > 1:
            raise ValueError("AVG_DENSITY must lie in (0, 1]")


@dataclass(frozen=True)
class WorkloadParams:
    nb_q: int = 100
    avg_nb_att: float = 5
    avg_nb_restr: float = 3
    prob_olap: float = 0.9
    avg_nb_aggreg: float = 3
    prob_cube: float = 0.3
    prob_having: float = 0.2
    avg_nb_dd: float = 3

    def __post_init__(self):
        _check_positive(self, {"nb_q", "avg_nb_att", "avg_nb_aggreg"})
        for name in ("prob_olap", "prob_cube", "prob_having"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name.upper()} must lie in [0, 1]")
        for name in ("avg_nb_restr", "avg_nb_dd"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name.upper()} must be non-negative")

    @property
    def prob_extract(self) -> float:
        return 1 - self.prob_olap

    @property
    def prob_rollup(self) -> float:
        return 1 - self.prob_cube


DERIVED_WORKLOAD_PARAMS = ("PROB_EXTRACT", "PROB_ROLLUP")


class Violation(NamedTuple):
    field: str
    message: str

    def __str__(self):
        return f"{self.field}: {self.message}"


def validate_low_level(p: LowLevelParams) -> list[Violation]:
    """Every violated constraint of ``p``; an empty list means valid."""
    out: list[Violation] = []

    def bad(name, msg):
        out.append(Violation(name, msg))

    if p.nb_ft < 1:
        bad("NB_FT", "must be >= 1")
    for name, seq in (("NB_DIM", p.nb_dim), ("NB_MEAS", p.nb_meas), ("DENSITY", p.density)):
        if len(seq) != p.nb_ft:
            bad(name, f"expected {p.nb_ft} entries (one per fact table), got {len(seq)}")
    for f, n in enumerate(p.nb_dim, 1):
        if n < 1:
            bad(f"NB_DIM({f})", "must be >= 1")
        elif n > p.tot_nb_dim:
            bad(f"NB_DIM({f})", f"{n} exceeds TOT_NB_DIM={p.tot_nb_dim}")
    if p.tot_nb_dim < 1:
        bad("TOT_NB_DIM", "must be >= 1")
    if p.tot_nb_dim > sum(p.nb_dim):
        bad("TOT_NB_DIM", f"TOT_NB_DIM exceeds Σ NB_DIM ({p.tot_nb_dim} > {sum(p.nb_dim)})")
    for f, n in enumerate(p.nb_meas, 1):
        if n < 1:
            bad(f"NB_MEAS({f})", "must be >= 1")
    for f, dens in enumerate(p.density, 1):
        if not 0 < dens <= 1:
            bad(f"DENSITY({f})", f"density outside (0,1]: {dens}")

    for name, seq in (
        ("NB_LEVELS", p.nb_levels),
        ("NB_ATT", p.nb_att),
        ("HHLEVEL_SIZE", p.hhlevel_size),
        ("DIM_SFACTOR", p.dim_sfactor),
    ):
        if len(seq) != p.tot_nb_dim:
            bad(name, f"expected {p.tot_nb_dim} entries (one per dimension), got {len(seq)}")
    for d in range(min(len(p.nb_levels), len(p.nb_att), len(p.hhlevel_size), len(p.dim_sfactor))):
        levels = p.nb_levels[d]
        if levels < 1:
            bad(f"NB_LEVELS({d + 1})", "must be >= 1")
        if len(p.nb_att[d]) != levels:
            bad(f"NB_ATT({d + 1})", f"expected {levels} entries, got {len(p.nb_att[d])}")
        for h, n in enumerate(p.nb_att[d], 1):
            if n < 1:
                bad(f"NB_ATT({d + 1},{h})", "must be >= 1")
        if p.hhlevel_size[d] < 1:
            bad(f"HHLEVEL_SIZE({d + 1})", "must be >= 1")
        sf = p.dim_sfactor[d]
        if levels > 1 and (sf is None or sf < 1):
            bad(f"DIM_SFACTOR({d + 1})", "must be >= 1 for a multi-level dimension")
    return out


def classify(p: LowLevelParams) -> SchemaKind:
    if p.nb_ft > 1:
        return SchemaKind.CONSTELLATION
    if any(n > 1 for n in p.nb_levels):
        return SchemaKind.SNOWFLAKE
    return SchemaKind.STAR
