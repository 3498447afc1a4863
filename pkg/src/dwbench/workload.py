"""Workload generation: initial OLAP/extraction queries plus drill-downs."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterator

from .datagen import MEASURE_HIGH, MEASURE_LOW
from .model import HierarchyLevelSpec, SchemaModel, WorkloadParams
from .query import (
    Aggregate,
    Column,
    GroupBy,
    GroupOp,
    Having,
    Join,
    QueryAst,
    QueryKind,
    Restriction,
)
from .rng import DEFAULT_SPREAD_RATIO, RandomSource, StringReferential

MAX_ATTRIBUTE_RETRIES = 8


@dataclass(frozen=True)
class WorkloadQuery:
    query_id: str
    query: QueryAst


@dataclass(frozen=True)
class Workload:
    queries: tuple[WorkloadQuery, ...]
    params: WorkloadParams
    schema_fingerprint: str
    seed: int

    def __len__(self):
        return len(self.queries)


def workload_source(seed: int) -> RandomSource:
    return RandomSource(seed, "workload")


class _Draft:
    """Mutable state of a query while its clauses are being chosen."""

    def __init__(self, fact_table: str):
        self.tables = [fact_table]
        self.joins: list[Join] = []
        self.attrs: list[Column] = []

    def join_chain(self, schema: SchemaModel, fk_table: str, dim_index: int, depth: int) -> HierarchyLevelSpec:
        """Join from the fact table up ``depth`` levels; returns the level reached."""
        dim = schema.dimension(dim_index)
        level = dim.entry_level
        left = Column(fk_table, level.primary_key)
        for step in range(depth):
            if level.table_name not in self.tables:
                self.tables.append(level.table_name)
                self.joins.append(Join(left, Column(level.table_name, level.primary_key)))
            if step + 1 < depth:
                left = Column(level.table_name, level.foreign_key)
                level = dim.level(level.level_index - 1)
        return level


def _pick_descriptor(src: RandomSource, level: HierarchyLevelSpec, taken: list[Column]) -> Column | None:
    free = [Column(level.table_name, d) for d in level.descriptors]
    free = [c for c in free if c not in taken]
    if not free:
        return None
    return src.skewed_choice(free)


def iter_query_groups(
    schema: SchemaModel,
    params: WorkloadParams,
    source: RandomSource,
    referential: StringReferential,
    spread_ratio: float = DEFAULT_SPREAD_RATIO,
) -> Iterator[list[QueryAst]]:
    """Endless stream of [initial query, drill-down, drill-down, ...] groups."""
    g = lambda mean: source.gaussian_int(mean, spread_ratio) if mean > 0 else 0  # noqa: E731
    while True:
        ft = source.skewed_choice(schema.fact_tables)
        draft = _Draft(ft.table_name)
        unused = list(ft.dimension_refs)
        last_level = None
        for _ in range(g(params.avg_nb_att)):
            if unused:
                dim_index = unused.pop(source.skewed_index(len(unused)) - 1)
            else:
                dim_index = source.skewed_choice(ft.dimension_refs)
            depth = source.uniform_int(1, len(schema.dimension(dim_index).levels))
            level = draft.join_chain(schema, ft.table_name, dim_index, depth)
            for _ in range(MAX_ATTRIBUTE_RETRIES):
                col = source.skewed_choice([Column(level.table_name, d) for d in level.descriptors])
                if col not in draft.attrs:
                    draft.attrs.append(col)
                    last_level = level
                    break
        if not draft.attrs:
            # every pick collided; fall back to one attribute of the entry level
            level = draft.join_chain(schema, ft.table_name, ft.dimension_refs[0], 1)
            draft.attrs.append(Column(level.table_name, level.descriptors[0]))
            last_level = level

        candidates = list(draft.attrs)
        restrictions = []
        for _ in range(min(g(params.avg_nb_restr), len(candidates))):
            col = candidates.pop(source.skewed_index(len(candidates)) - 1)
            restrictions.append(Restriction(col, referential.pick(source, col.name)))

        base = dict(
            from_tables=tuple(draft.tables),
            join_conditions=tuple(draft.joins),
            restrictions=tuple(restrictions),
        )
        if source.random() >= params.prob_olap:
            yield [QueryAst(tuple(draft.attrs), (), kind=QueryKind.EXTRACTION, **base)]
            continue

        measures: list[str] = []
        for _ in range(g(params.avg_nb_aggreg)):
            m = source.skewed_choice(ft.measures)
            if m not in measures:
                measures.append(m)
        aggs = tuple(Aggregate(Column(ft.table_name, m), f"AGG{k}") for k, m in enumerate(measures, 1))
        op = GroupOp.CUBE if source.random() < params.prob_cube else GroupOp.ROLLUP
        having = None
        if source.random() < params.prob_having:
            alias = source.skewed_choice(aggs).alias
            having = Having(alias, round(source.uniform_float(MEASURE_LOW, MEASURE_HIGH), 2))

        attrs = tuple(draft.attrs)
        group = [QueryAst(attrs, aggs, group_by=GroupBy(op, attrs), having=having, kind=QueryKind.OLAP, **base)]
        level = last_level
        for _ in range(g(params.avg_nb_dd)):
            if level.finer is None:
                break
            dim = schema.dimension(level.dimension_index)
            level = dim.level(level.level_index + 1)
            col = _pick_descriptor(source, level, list(attrs))
            if col is None:
                break
            attrs = attrs + (col,)
            group.append(
                QueryAst(
                    attrs, aggs, group_by=GroupBy(op, attrs), having=having,
                    kind=QueryKind.DRILL_DOWN, parent_query="", **base,
                )
            )
        yield group


def generate_workload(
    schema: SchemaModel,
    params: WorkloadParams,
    seed: int,
    referential: StringReferential | None = None,
    spread_ratio: float = DEFAULT_SPREAD_RATIO,
) -> Workload:
    """Draw query groups until at least NB_Q queries exist.

    Initial queries are numbered Q1, Q2, ...; drill-downs of Qi are Qi.D1,
    Qi.D2, ... and follow their parent directly.
    """
    referential = referential or StringReferential.from_seed(seed)
    groups = iter_query_groups(schema, params, workload_source(seed), referential, spread_ratio)
    out: list[WorkloadQuery] = []
    i = 0
    while len(out) < params.nb_q:
        i += 1
        group = next(groups)
        parent = f"Q{i}"
        out.append(WorkloadQuery(parent, group[0]))
        for k, q in enumerate(group[1:], 1):
            out.append(WorkloadQuery(f"{parent}.D{k}", _with_parent(q, parent)))
    return Workload(tuple(out), params, schema.fingerprint(), seed)


def _with_parent(q: QueryAst, parent: str) -> QueryAst:
    return replace(q, parent_query=parent)
