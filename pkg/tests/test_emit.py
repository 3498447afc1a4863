import hashlib
import io

import pytest

from dwbench.config import parse_config
from dwbench.datagen import generate_warehouse
from dwbench.emit import (
    EmitError,
    emit_data,
    emit_ddl,
    emit_workload,
    read_manifest,
    read_workload,
    write_table,
)
from dwbench.model import WorkloadParams
from dwbench.pipeline import generate, regenerate_workload
from dwbench.presets import DW1, DW3
from dwbench.query import QueryKind, render_sql
from dwbench.schema import build_schema, schema_source
from dwbench.workload import generate_workload


def test_ddl_statement_counts():
    assert emit_ddl(build_schema(DW3, schema_source(0))).count("CREATE TABLE") == 4
    assert emit_ddl(build_schema(DW1, schema_source(0))).count("CREATE TABLE") == 6


def test_ddl_references_precede_use():
    ddl = emit_ddl(build_schema(DW1, schema_source(0)))
    created = []
    for line in ddl.splitlines():
        if line.startswith("CREATE TABLE"):
            created.append(line.split()[2])
        if "REFERENCES" in line:
            assert line.split("REFERENCES ")[1].split()[0] in created


@pytest.mark.parametrize("dialect", ["standard", "sqlite", "duckdb", "postgres", "oracle"])
def test_ddl_dialects(dialect):
    ddl = emit_ddl(build_schema(DW3, schema_source(0)), dialect)
    assert "PRIMARY KEY (DIM1_1_PK, DIM2_1_PK, DIM3_1_PK)" in ddl


def test_ddl_runs_on_sqlite():
    import sqlite3

    conn = sqlite3.connect(":memory:")
    conn.executescript(emit_ddl(build_schema(DW1, schema_source(0)), "sqlite"))
    names = {r[0] for r in conn.execute("SELECT name FROM sqlite_master WHERE type='table'")}
    assert names == {"DIM1_1", "DIM1_2", "DIM2_1", "DIM2_2", "DIM2_3", "FT1"}


def test_flat_lines(dw1_small):
    _, schema = dw1_small
    wh = generate_warehouse(schema, 0)
    for name in schema.table_names():
        buf = io.StringIO()
        n = write_table(wh[name], buf, "dat")
        lines = buf.getvalue().splitlines()
        assert n == len(buf.getvalue().encode())
        assert len(lines) == len(wh[name])
        assert all(line.count("|") == len(wh[name].columns) - 1 for line in lines)
        first = lines[0].split("|")
        assert first[0] == str(wh[name].data[0][0])


def test_insert_format_runs_on_sqlite(dw1_small):
    import sqlite3

    _, schema = dw1_small
    wh = generate_warehouse(schema, 0)
    conn = sqlite3.connect(":memory:")
    conn.executescript(emit_ddl(schema, "sqlite"))
    for name in schema.table_names():
        buf = io.StringIO()
        write_table(wh[name], buf, "sql")
        conn.executescript(buf.getvalue())
        assert conn.execute(f"SELECT count(*) FROM {name}").fetchone()[0] == len(wh[name])


def _digest(path):
    h = hashlib.sha256()
    for f in sorted(p for p in path.rglob("*") if p.is_file()):
        h.update(f.relative_to(path).as_posix().encode())
        h.update(f.read_bytes())
    return h.hexdigest()


def _cfg(out, **kw):
    cfg = parse_config("[low]\n" + LOW_TEXT, seed=kw.pop("seed", 1), out=out, **kw)
    return cfg


LOW_TEXT = """
NB_FT = 1
NB_DIM = 2
TOT_NB_DIM = 2
NB_MEAS = 5
DENSITY = 0.6
NB_LEVELS = 2, 3
NB_ATT = 5/5, 4/4/4
HHLEVEL_SIZE = 3
DIM_SFACTOR = 3
"""


def test_byte_identical_runs(tmp_path):
    generate(_cfg(tmp_path / "a"))
    generate(_cfg(tmp_path / "b", workers=4))
    assert _digest(tmp_path / "a") == _digest(tmp_path / "b")
    generate(_cfg(tmp_path / "c", seed=2))
    assert _digest(tmp_path / "a") != _digest(tmp_path / "c")


def test_manifest_contents(tmp_path):
    m = generate(_cfg(tmp_path))
    assert read_manifest(tmp_path) == m
    assert m["seed"] == 1
    assert m["schema_kind"] == "snowflake"
    assert m["tables"]["DIM2_3"]["rows"] == 27
    assert m["data_bytes"] == sum((tmp_path / "data" / f"{t}.dat").stat().st_size for t in m["tables"])


def test_missing_manifest(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_manifest(tmp_path)


def test_unwritable_output(tmp_path, dw1_small):
    _, schema = dw1_small
    wh = generate_warehouse(schema, 0)
    (tmp_path / "data").write_text("a file where the directory should be")
    with pytest.raises((EmitError, OSError)):
        emit_data(wh, tmp_path)


def test_workload_file_ids():
    schema = build_schema(DW1, schema_source(0))
    wl = generate_workload(schema, WorkloadParams(nb_q=20, avg_nb_dd=0), 0)
    text = emit_workload(wl)
    header, entries = read_workload(text)
    assert [e.query_id for e in entries] == [f"Q{i}" for i in range(1, 21)]
    assert text.count(";\n") == 20
    assert header["seed"] == "0" and header["schema"] == schema.fingerprint()
    assert header["NB_Q"] == "20"


def test_workload_file_round_trip():
    schema = build_schema(DW1, schema_source(0))
    wl = generate_workload(schema, WorkloadParams(nb_q=60), 2)
    _, entries = read_workload(emit_workload(wl))
    assert len(entries) == len(wl)
    for e, wq in zip(entries, wl.queries):
        assert e.query_id == wq.query_id
        assert e.kind is wq.query.kind
        assert e.parent == wq.query.parent_query
        assert e.sql == render_sql(wq.query)
    assert any(e.kind is QueryKind.DRILL_DOWN for e in entries)


def test_workload_file_malformed():
    with pytest.raises(ValueError):
        read_workload("-- Q1 kind=olap parent=none\nSELECT a FROM t\n")
    with pytest.raises(ValueError):
        read_workload("SELECT a FROM t;\n")


def test_regenerate_from_manifest(tmp_path):
    generate(_cfg(tmp_path))
    original = (tmp_path / "workload.sql").read_text()
    regenerate_workload(tmp_path)
    assert (tmp_path / "workload.sql").read_text() == original
    regenerate_workload(tmp_path, WorkloadParams(nb_q=5, avg_nb_dd=0), seed=9)
    header, entries = read_workload((tmp_path / "workload.sql").read_text())
    assert len(entries) == 5 and header["seed"] == "9"
