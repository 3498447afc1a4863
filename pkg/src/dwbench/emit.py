"""Serialisation of schema, data and workload to files.

Layout under an output directory::

    schema.sql          CREATE TABLE statements, referenced tables first
    data/<TABLE>.dat    "|"-delimited rows (or data/<TABLE>.sql INSERT scripts)
    workload.sql        annotated workload statements
    manifest            JSON: seed, effective parameters, row counts, bytes
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .datagen import TableExtension, Warehouse
from .model import AttributeKind, SchemaModel, WorkloadParams
from .query import QueryKind, render_sql, sql_string
from .schema import DESCRIPTOR_SUFFIX_BYTES
from .workload import Workload

DIALECTS = {
    "standard": {"key": "INTEGER", "measure": "REAL", "char": "CHAR({n})"},
    "sqlite": {"key": "INTEGER", "measure": "REAL", "char": "CHAR({n})"},
    "duckdb": {"key": "INTEGER", "measure": "FLOAT", "char": "VARCHAR({n})"},
    "postgres": {"key": "INTEGER", "measure": "REAL", "char": "CHAR({n})"},
    "oracle": {"key": "NUMBER(10)", "measure": "BINARY_FLOAT", "char": "CHAR({n})"},
}

FIELD_SEPARATOR = "|"
ROWS_PER_BLOCK = 100_000
DATA_FORMATS = ("dat", "sql")


class EmitError(OSError):
    pass


def emit_ddl(schema: SchemaModel, dialect: str = "standard") -> str:
    types = DIALECTS[dialect]
    stmts = []
    for table in schema.table_names():
        attrs = schema.attributes(table)
        lines = []
        for a in attrs:
            if a.kind is AttributeKind.DESCRIPTOR:
                typ = types["char"].format(n=len(a.name) + DESCRIPTOR_SUFFIX_BYTES)
            elif a.kind is AttributeKind.MEASURE:
                typ = types["measure"]
            else:
                typ = types["key"] + " NOT NULL"
            lines.append(f"  {a.name} {typ}")
        # fact tables have no surrogate key: their foreign keys form the key
        keys = [a.name for a in attrs if a.kind is AttributeKind.PRIMARY_KEY]
        keys = keys or [a.name for a in attrs if a.kind is AttributeKind.FOREIGN_KEY]
        lines.append(f"  PRIMARY KEY ({', '.join(keys)})")
        for a in attrs:
            if a.kind is AttributeKind.FOREIGN_KEY:
                lines.append(f"  FOREIGN KEY ({a.name}) REFERENCES {a.referenced_table} ({a.name})")
        stmts.append(f"CREATE TABLE {table} (\n" + ",\n".join(lines) + "\n);\n")
    return "\n".join(stmts)


def _format_column(col: np.ndarray) -> list[str]:
    if col.dtype.kind == "f":
        return [f"{v:.6g}" for v in col.tolist()]
    if col.dtype.kind in "iu":
        return [str(v) for v in col.tolist()]
    return [str(v) for v in col]


def iter_flat_blocks(ext: TableExtension):
    """Text blocks of the "|"-delimited file, one line per row."""
    for start in range(0, len(ext), ROWS_PER_BLOCK):
        cols = [_format_column(c[start : start + ROWS_PER_BLOCK]) for c in ext.data]
        yield "".join(FIELD_SEPARATOR.join(row) + "\n" for row in zip(*cols))


def iter_insert_blocks(ext: TableExtension):
    head = f"INSERT INTO {ext.table_name} ({', '.join(ext.columns)}) VALUES ("
    quoted = [c.dtype.kind == "O" for c in ext.data]
    for start in range(0, len(ext), ROWS_PER_BLOCK):
        cols = [
            [sql_string(v) for v in c[start : start + ROWS_PER_BLOCK]]
            if q
            else _format_column(c[start : start + ROWS_PER_BLOCK])
            for c, q in zip(ext.data, quoted)
        ]
        yield "".join(head + ", ".join(row) + ");\n" for row in zip(*cols))


def write_table(ext: TableExtension, fh, fmt: str = "dat") -> int:
    """Write one table to a text stream; returns the byte count."""
    blocks = iter_flat_blocks(ext) if fmt == "dat" else iter_insert_blocks(ext)
    n = 0
    for block in blocks:
        fh.write(block)
        n += len(block.encode())
    return n


def emit_data(wh: Warehouse, out_dir: Path, fmt: str = "dat", workers: int = 1) -> dict[str, int]:
    """One file per table under ``out_dir``/data; returns bytes per table."""
    if fmt not in DATA_FORMATS:
        raise ValueError(f"unknown data format {fmt!r}")
    data_dir = Path(out_dir) / "data"
    data_dir.mkdir(parents=True, exist_ok=True)

    def one(name):
        path = data_dir / f"{name}.{fmt}"
        try:
            with open(path, "w", encoding="ascii", newline="\n") as fh:
                return name, write_table(wh.tables[name], fh, fmt)
        except OSError as exc:
            raise EmitError(f"{name}: cannot write {path}: {exc}") from exc

    names = wh.schema.table_names()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return dict(pool.map(one, names))
    return dict(one(n) for n in names)


def params_line(params) -> str:
    return " ".join(f"{f.name.upper()}={getattr(params, f.name)}" for f in fields(params))


def emit_workload(workload: Workload) -> str:
    out = [
        f"-- seed={workload.seed} schema={workload.schema_fingerprint} queries={len(workload)}",
        f"-- params {params_line(workload.params)}",
        "",
    ]
    for wq in workload.queries:
        parent = wq.query.parent_query or "none"
        out.append(f"-- {wq.query_id} kind={wq.query.kind.value} parent={parent}")
        out.append(render_sql(wq.query) + ";")
        out.append("")
    return "\n".join(out)


@dataclass(frozen=True)
class WorkloadEntry:
    query_id: str
    kind: QueryKind
    parent: str | None
    sql: str


_ENTRY = re.compile(r"^-- (Q\d+(?:\.D\d+)?) kind=(\w+) parent=(\S+)$")
_HEADER = re.compile(r"(\w+)=(\S+)")


def read_workload(text: str) -> tuple[dict[str, str], list[WorkloadEntry]]:
    """Parse a workload file into its header fields and statements."""
    header: dict[str, str] = {}
    entries: list[WorkloadEntry] = []
    current = None
    buf: list[str] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        m = _ENTRY.match(line)
        if m:
            if current is not None:
                raise ValueError(f"line {lineno}: statement {current[0]} lacks a terminating ';'")
            qid, kind, parent = m.groups()
            current = (qid, QueryKind(kind), None if parent == "none" else parent)
            buf = []
            continue
        if current is None:
            if line.startswith("--"):
                header.update(_HEADER.findall(line))
            elif line.strip():
                raise ValueError(f"line {lineno}: SQL outside an annotated statement")
            continue
        buf.append(line)
        if line.rstrip().endswith(";"):
            sql = "\n".join(buf).rstrip()[:-1].rstrip()
            entries.append(WorkloadEntry(*current, sql))
            current = None
    if current is not None:
        raise ValueError(f"statement {current[0]} lacks a terminating ';'")
    return header, entries


def write_manifest(out_dir: Path, doc: dict) -> Path:
    path = Path(out_dir) / "manifest"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def read_manifest(out_dir: Path) -> dict:
    path = Path(out_dir) / "manifest"
    if not path.exists():
        raise FileNotFoundError(f"no manifest in {out_dir}; run 'generate' first")
    return json.loads(path.read_text())


def workload_params_dict(params: WorkloadParams) -> dict:
    return {k.upper(): v for k, v in asdict(params).items()}
