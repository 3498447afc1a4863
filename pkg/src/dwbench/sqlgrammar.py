"""Parser for the workload query language.

Normative grammar (keywords case-insensitive, ``--`` comments ignored)::

    query       = "SELECT" item {"," item}
                  "FROM" ident {"," ident}
                  ["WHERE" condition {("AND" | "OR") condition}]
                  ["GROUP" "BY" (("CUBE" | "ROLLUP") "(" columns ")" | columns)]
                  ["HAVING" (ident | aggregate) compare (literal | column)]
                  [";"]
    item        = column | aggregate ["AS" ident]
    aggregate   = ("SUM" | "AVG" | "MIN" | "MAX" | "COUNT") "(" column ")"
    columns     = column {"," column}
    column      = ident ["." ident]
    condition   = column compare (column | literal)
    compare     = "=" | "<>" | "!=" | "<" | "<=" | ">" | ">="
    literal     = string | number

Context rules on top of the productions:

* a GROUP BY clause requires at least one aggregate;
* mixing plain columns and aggregates in the select list requires GROUP BY,
  and every plain column must then appear in the group-by list;
* HAVING requires GROUP BY; a bare identifier there must be an aggregate alias.

There is no ``*`` projection and no sub-query anywhere.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

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

KEYWORDS = {
    "SELECT", "FROM", "WHERE", "GROUP", "BY", "CUBE", "ROLLUP", "HAVING",
    "AND", "OR", "AS", "SUM", "AVG", "MIN", "MAX", "COUNT", "NOT", "IN",
}
AGGREGATES = {"SUM", "AVG", "MIN", "MAX", "COUNT"}
COMPARE = {"=", "<>", "!=", "<", "<=", ">", ">="}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<string>'(?:[^']|'')*')
  | (?P<number>-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|>=|<>|!=|[=<>])
  | (?P<punct>[,().;*])
    """,
    re.VERBOSE,
)


class SqlSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SqlSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "ident" and value.upper() in KEYWORDS:
                kind, value = "keyword", value.upper()
            out.append(Token(kind, value, pos))
        pos = m.end()
    out.append(Token("eof", "", len(text)))
    return out


@dataclass
class Condition:
    column: Column
    op: str
    operand: Column | str | float


@dataclass
class ParsedQuery:
    columns: list[Column] = field(default_factory=list)
    aggregates: list[Aggregate] = field(default_factory=list)
    tables: list[str] = field(default_factory=list)
    conditions: list[Condition] = field(default_factory=list)
    connectors: list[str] = field(default_factory=list)
    group_op: GroupOp | None = None
    group_columns: list[Column] = field(default_factory=list)
    having_target: str | Aggregate | None = None
    having_op: str | None = None
    having_value: object = None


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str):
        raise SqlSyntaxError(msg, self.tok.pos)

    def accept(self, value: str) -> bool:
        if self.tok.kind in ("keyword", "punct", "op") and self.tok.value == value:
            self.i += 1
            return True
        return False

    def expect(self, value: str):
        if not self.accept(value):
            found = self.tok.value or "end of input"
            self.error(f"expected {value}, found {found}")

    def ident(self) -> str:
        if self.tok.kind != "ident":
            if self.tok.value == "SELECT":
                self.error("nested queries are not supported")
            if self.tok.value == "*":
                self.error("star projection is not supported")
            self.error(f"expected identifier, found {self.tok.value or 'end of input'}")
        value = self.tok.value
        self.i += 1
        return value

    def column(self) -> Column:
        first = self.ident()
        if self.accept("."):
            return Column(first, self.ident())
        return Column("", first)

    def aggregate_call(self) -> tuple[str, Column]:
        func = self.tok.value
        self.i += 1
        self.expect("(")
        col = self.column()
        self.expect(")")
        return func, col

    def compare(self) -> str:
        if self.tok.kind == "op" and self.tok.value in COMPARE:
            value = self.tok.value
            self.i += 1
            return value
        self.error("expected comparison operator")

    def literal(self):
        t = self.tok
        if t.kind == "string":
            self.i += 1
            return t.value[1:-1].replace("''", "'")
        if t.kind == "number":
            self.i += 1
            return float(t.value)
        self.error("expected literal")

    def query(self) -> ParsedQuery:
        q = ParsedQuery()
        self.expect("SELECT")
        n_agg = 0
        while True:
            if self.tok.kind == "keyword" and self.tok.value in AGGREGATES:
                func, col = self.aggregate_call()
                n_agg += 1
                alias = self.ident() if self.accept("AS") else f"{func}_{n_agg}"
                q.aggregates.append(Aggregate(col, alias, func))
            else:
                q.columns.append(self.column())
            if not self.accept(","):
                break
        self.expect("FROM")
        q.tables.append(self.ident())
        while self.accept(","):
            q.tables.append(self.ident())
        if self.accept("WHERE"):
            q.conditions.append(self.condition())
            while self.tok.value in ("AND", "OR") and self.tok.kind == "keyword":
                q.connectors.append(self.tok.value)
                self.i += 1
                q.conditions.append(self.condition())
        if self.accept("GROUP"):
            self.expect("BY")
            if self.tok.value in ("CUBE", "ROLLUP") and self.tok.kind == "keyword":
                q.group_op = GroupOp(self.tok.value.lower())
                self.i += 1
                self.expect("(")
                q.group_columns = self.columns()
                self.expect(")")
            else:
                q.group_op = GroupOp.PLAIN
                q.group_columns = self.columns()
        if self.accept("HAVING"):
            if self.tok.kind == "keyword" and self.tok.value in AGGREGATES:
                func, col = self.aggregate_call()
                q.having_target = Aggregate(col, "", func)
            else:
                q.having_target = self.ident()
            q.having_op = self.compare()
            q.having_value = self.column() if self.tok.kind == "ident" else self.literal()
        self.accept(";")
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.value!r}")
        return q

    def columns(self) -> list[Column]:
        cols = [self.column()]
        while self.accept(","):
            cols.append(self.column())
        return cols

    def condition(self) -> Condition:
        if self.tok.value == "(":
            self.error("nested queries and parenthesised conditions are not supported")
        col = self.column()
        op = self.compare()
        if self.tok.value == "(":
            self.error("nested queries are not supported")
        operand = self.column() if self.tok.kind == "ident" else self.literal()
        return Condition(col, op, operand)


def check_grammar(text: str) -> ParsedQuery:
    """Parse ``text`` or raise :class:`SqlSyntaxError` with a position."""
    q = _Parser(text).query()
    if q.group_op is not None and not q.aggregates:
        raise SqlSyntaxError("GROUP BY requires an aggregate in the select list", 0)
    if q.aggregates and q.columns and q.group_op is None:
        raise SqlSyntaxError("mixing columns and aggregates requires GROUP BY", 0)
    if q.group_op is not None:
        missing = [c for c in q.columns if c not in q.group_columns]
        if missing:
            raise SqlSyntaxError(f"{missing[0]} is selected but not grouped", 0)
    if q.having_target is not None:
        if q.group_op is None:
            raise SqlSyntaxError("HAVING requires GROUP BY", 0)
        if isinstance(q.having_target, str) and q.having_target not in {a.alias for a in q.aggregates}:
            raise SqlSyntaxError(f"HAVING names unknown alias {q.having_target}", 0)
    return q


def parse_query(text: str) -> QueryAst:
    """Parse generator-style SQL back into a :class:`QueryAst`.

    Only the subset the workload generator emits is accepted: AND-only
    WHERE clauses, equality predicates, SUM aggregates, CUBE/ROLLUP
    grouping and ``>=`` HAVING.
    """
    q = check_grammar(text)
    if "OR" in q.connectors:
        raise ValueError("OR conditions are outside the generated subset")
    joins, restrictions = [], []
    for c in q.conditions:
        if c.op != "=":
            raise ValueError(f"comparison {c.op} is outside the generated subset")
        if isinstance(c.operand, Column):
            joins.append(Join(c.column, c.operand))
        elif isinstance(c.operand, str):
            restrictions.append(Restriction(c.column, c.operand))
        else:
            raise ValueError("numeric restrictions are outside the generated subset")
    having = None
    if q.having_target is not None:
        if q.having_op != ">=" or not isinstance(q.having_value, float):
            raise ValueError("only 'HAVING aggregate >= number' is generated")
        target = q.having_target
        if isinstance(target, Aggregate):
            match = [a for a in q.aggregates if (a.function, a.column) == (target.function, target.column)]
            if not match:
                raise ValueError("HAVING aggregate is not selected")
            alias = match[0].alias
        else:
            alias = target
        having = Having(alias, q.having_value)
    group_by = None
    if q.group_op is not None:
        group_by = GroupBy(q.group_op, tuple(q.group_columns))
    return QueryAst(
        select_attributes=tuple(q.columns),
        select_aggregates=tuple(q.aggregates),
        from_tables=tuple(q.tables),
        join_conditions=tuple(joins),
        restrictions=tuple(restrictions),
        group_by=group_by,
        having=having,
        kind=QueryKind.OLAP if group_by else QueryKind.EXTRACTION,
    )
