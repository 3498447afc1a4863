"""Query AST for the decision-support workload and its SQL-99 rendering."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class QueryKind(str, enum.Enum):
    OLAP = "olap"
    EXTRACTION = "extraction"
    DRILL_DOWN = "drilldown"


class GroupOp(str, enum.Enum):
    PLAIN = "plain"
    CUBE = "cube"
    ROLLUP = "rollup"


@dataclass(frozen=True, order=True)
class Column:
    table: str
    name: str

    def __str__(self):
        return f"{self.table}.{self.name}" if self.table else self.name


@dataclass(frozen=True)
class Aggregate:
    column: Column
    alias: str
    function: str = "SUM"

    @property
    def expr(self) -> str:
        return f"{self.function}({self.column})"


@dataclass(frozen=True)
class Join:
    """``fk = pk`` between a referencing and a referenced table."""

    left: Column
    right: Column


@dataclass(frozen=True)
class Restriction:
    column: Column
    literal: str


@dataclass(frozen=True)
class GroupBy:
    operator: GroupOp
    columns: tuple[Column, ...]


@dataclass(frozen=True)
class Having:
    alias: str
    threshold: float


@dataclass(frozen=True)
class QueryAst:
    select_attributes: tuple[Column, ...]
    select_aggregates: tuple[Aggregate, ...]
    from_tables: tuple[str, ...]
    join_conditions: tuple[Join, ...]
    restrictions: tuple[Restriction, ...] = ()
    group_by: GroupBy | None = None
    having: Having | None = None
    kind: QueryKind = QueryKind.EXTRACTION
    parent_query: str | None = None

    def problems(self) -> list[str]:
        """Broken structural invariants; empty when well formed."""
        out = []
        if self.kind is QueryKind.EXTRACTION:
            if self.select_aggregates or self.group_by or self.having:
                out.append("extraction query carries aggregates, group-by or having")
        else:
            if not self.select_aggregates:
                out.append("aggregate query without aggregates")
            if self.group_by is None or self.group_by.operator is GroupOp.PLAIN:
                out.append("aggregate query without CUBE/ROLLUP group-by")
        if (self.kind is QueryKind.DRILL_DOWN) != (self.parent_query is not None):
            out.append("parent_query is set iff the query is a drill-down")
        if self.group_by and tuple(self.group_by.columns) != tuple(self.select_attributes):
            out.append("group-by list differs from the select list")
        if self.having and self.having.alias not in {a.alias for a in self.select_aggregates}:
            out.append(f"having alias {self.having.alias} names no aggregate")
        tables = set(self.from_tables)
        for j in self.join_conditions:
            if j.left.table not in tables or j.right.table not in tables:
                out.append(f"join {j.left} = {j.right} uses a table outside FROM")
        for c in self.select_attributes:
            if c.table not in tables:
                out.append(f"{c} selected from a table outside FROM")
        return out


def sql_string(value: str) -> str:
    return "'" + value.replace("'", "''") + "'"


def format_threshold(x: float) -> str:
    return f"{x:.2f}"


def render_sql(q: QueryAst) -> str:
    """SQL text, one clause per line, no trailing semicolon."""
    items = [str(c) for c in q.select_attributes]
    items += [f"{a.expr} AS {a.alias}" for a in q.select_aggregates]
    lines = ["SELECT " + ", ".join(items), "FROM " + ", ".join(q.from_tables)]
    conds = [f"{j.left} = {j.right}" for j in q.join_conditions]
    conds += [f"{r.column} = {sql_string(r.literal)}" for r in q.restrictions]
    if conds:
        lines.append("WHERE " + "\n  AND ".join(conds))
    if q.group_by is not None:
        cols = ", ".join(str(c) for c in q.group_by.columns)
        if q.group_by.operator is GroupOp.PLAIN:
            lines.append(f"GROUP BY {cols}")
        else:
            lines.append(f"GROUP BY {q.group_by.operator.value.upper()}({cols})")
    if q.having is not None:
        # aggregate expression rather than alias: not every engine resolves
        # select aliases in HAVING
        agg = next(a for a in q.select_aggregates if a.alias == q.having.alias)
        lines.append(f"HAVING {agg.expr} >= {format_threshold(q.having.threshold)}")
    return "\n".join(lines)
