"""Workload execution against a SQL engine, timing export and gain reports."""

from __future__ import annotations

import csv
import io
import logging
import sqlite3
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

from .emit import WorkloadEntry, read_workload

log = logging.getLogger(__name__)

TIMING_HEADER = ("query_id", "run_index", "elapsed_ms", "status")


class SqlSession(Protocol):
    def execute(self, statement: str) -> int:
        """Run one statement, drain its result, return the row count."""

    def close(self) -> None: ...


class ConnectionLost(RuntimeError):
    """Raised by a session when the connection itself is gone."""


class SQLiteSession:
    """stdlib sqlite3 engine; has no CUBE/ROLLUP."""

    dialect = "sqlite"
    supports_cube = False

    def __init__(self, path: str = ":memory:"):
        self.conn = sqlite3.connect(path)

    def execute(self, statement: str) -> int:
        try:
            return len(self.conn.execute(statement).fetchall())
        except sqlite3.ProgrammingError as exc:
            if "closed" in str(exc):
                raise ConnectionLost(str(exc)) from exc
            raise

    def load_flat_file(self, table: str, path: Path) -> int:
        with open(path) as fh:
            rows = [line.rstrip("\n").split("|") for line in fh]
        if rows:
            marks = ", ".join("?" * len(rows[0]))
            self.conn.executemany(f"INSERT INTO {table} VALUES ({marks})", rows)
        self.conn.commit()
        return len(rows)

    def close(self):
        self.conn.close()


class DuckDBSession:
    dialect = "duckdb"
    supports_cube = True

    def __init__(self, path: str = ":memory:"):
        import duckdb

        self._duckdb = duckdb
        self.conn = duckdb.connect(path)

    def execute(self, statement: str) -> int:
        try:
            return len(self.conn.execute(statement).fetchall())
        except self._duckdb.ConnectionException as exc:
            raise ConnectionLost(str(exc)) from exc

    def load_flat_file(self, table: str, path: Path) -> int:
        if Path(path).stat().st_size == 0:
            return 0
        # column types come from the table; sniffing misreads tiny files
        self.conn.execute(f"COPY {table} FROM '{path}' (DELIMITER '|', HEADER false, AUTO_DETECT false)")
        return self.conn.execute(f"SELECT count(*) FROM {table}").fetchone()[0]

    def close(self):
        self.conn.close()


ENGINES = {"sqlite": SQLiteSession, "duckdb": DuckDBSession}


def connect(spec: str) -> SqlSession:
    """Open a session from ``engine:target``, e.g. ``duckdb:dw1.duckdb``.

    A bare engine name opens an in-memory database.
    """
    engine, _, target = spec.partition(":")
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; expected one of {sorted(ENGINES)}")
    return ENGINES[engine](target or ":memory:")


def split_statements(script: str) -> list[str]:
    return [s.strip() for s in script.split(";\n") if s.strip().rstrip(";")]


def load_warehouse(session: SqlSession, out_dir: Path) -> dict[str, int]:
    """Create the tables of ``out_dir``/schema.sql and load its data files."""
    out_dir = Path(out_dir)
    for stmt in split_statements((out_dir / "schema.sql").read_text()):
        session.execute(stmt.rstrip(";"))
    counts = {}
    for table in _tables_in_order(out_dir / "schema.sql"):
        dat = out_dir / "data" / f"{table}.dat"
        if dat.exists():
            counts[table] = session.load_flat_file(table, dat)
        else:
            for stmt in split_statements((out_dir / "data" / f"{table}.sql").read_text()):
                session.execute(stmt.rstrip(";"))
            counts[table] = session.execute(f"SELECT 1 FROM {table}")
    return counts


def _tables_in_order(schema_sql: Path) -> list[str]:
    return [
        line.split()[2]
        for line in schema_sql.read_text().splitlines()
        if line.startswith("CREATE TABLE ")
    ]


@dataclass(frozen=True)
class TimingRecord:
    query_id: str
    run_index: int
    elapsed_ms: int
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


class RunAborted(RuntimeError):
    def __init__(self, records: list[TimingRecord], cause: Exception):
        self.records = records
        super().__init__(f"connection lost after {len(records)} records: {cause}")


def run_workload(
    session: SqlSession,
    workload: str | Sequence[WorkloadEntry],
    runs: int = 1,
    warmup: int = 0,
    clock=time.perf_counter_ns,
) -> list[TimingRecord]:
    """Execute every statement in file order, ``warmup`` untimed passes first.

    A failing statement is recorded with an error status and the run goes on;
    a lost connection aborts with :class:`RunAborted` carrying the partial
    records.
    """
    if runs < 1 or warmup < 0:
        raise ValueError("runs must be >= 1 and warmup >= 0")
    entries = read_workload(workload)[1] if isinstance(workload, str) else list(workload)
    records: list[TimingRecord] = []
    for n in range(warmup + runs):
        run_index = n - warmup + 1
        for e in entries:
            status = "ok"
            try:
                start = clock()
                session.execute(e.sql)
                stop = clock()
            except ConnectionLost as exc:
                if run_index >= 1:
                    records.append(TimingRecord(e.query_id, run_index, 0, f"error: {exc}"))
                raise RunAborted(records, exc) from exc
            except Exception as exc:  # engine errors are data, not failures
                stop = clock()
                status = f"error: {exc}".replace("\n", " ")
                log.warning("%s failed: %s", e.query_id, exc)
            if run_index >= 1:
                records.append(TimingRecord(e.query_id, run_index, (stop - start) // 1_000_000, status))
    return records


def _ordered(records: Sequence[TimingRecord]) -> list[TimingRecord]:
    first_seen: dict[str, int] = {}
    for r in records:
        first_seen.setdefault(r.query_id, len(first_seen))
    return sorted(records, key=lambda r: (first_seen[r.query_id], r.run_index))


def export_timings(records: Sequence[TimingRecord], fh=None) -> str:
    """CSV text (query order, then run index); also written to ``fh`` if given."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TIMING_HEADER)
    for r in _ordered(records):
        w.writerow((r.query_id, r.run_index, r.elapsed_ms, r.status))
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text


def read_timings(source: str | Path | io.TextIOBase) -> list[TimingRecord]:
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return read_timings(fh)
    reader = csv.reader(source)
    header = tuple(next(reader))
    if header != TIMING_HEADER:
        raise ValueError(f"unexpected timing header {header}")
    return [TimingRecord(q, int(i), int(ms), status) for q, i, ms, status in reader]


class GainError(ValueError):
    pass


def per_query_means(records: Sequence[TimingRecord]) -> dict[str, float]:
    bad = [r for r in records if not r.ok]
    if bad:
        raise GainError(f"{bad[0].query_id} run {bad[0].run_index} has status {bad[0].status!r}")
    sums: dict[str, list[int]] = {}
    for r in records:
        sums.setdefault(r.query_id, []).append(r.elapsed_ms)
    return {q: sum(v) / len(v) for q, v in sums.items()}


def _paired(reference, candidate):
    ref, cand = per_query_means(reference), per_query_means(candidate)
    if set(ref) != set(cand):
        diff = sorted(set(ref) ^ set(cand))
        raise GainError(f"query sets differ: {diff[:5]}")
    return ref, cand


def compute_gain(reference: Sequence[TimingRecord], candidate: Sequence[TimingRecord]) -> float:
    """1 - total candidate time / total reference time (per-query means)."""
    ref, cand = _paired(reference, candidate)
    total = sum(ref.values())
    if total == 0:
        raise GainError("reference total time is zero")
    return 1 - sum(cand.values()) / total


def mean_query_gain(reference: Sequence[TimingRecord], candidate: Sequence[TimingRecord]) -> float:
    """Average of the per-query gains; reported alongside, never as the gain."""
    ref, cand = _paired(reference, candidate)
    return sum(1 - cand[q] / ref[q] for q in ref) / len(ref)


@dataclass
class GainReport:
    names: list[str]
    per_query: dict[str, dict[str, float]]  # config -> query -> mean ms
    gains: dict[str, float]
    mean_gains: dict[str, float]

    @classmethod
    def build(cls, configs: dict[str, Sequence[TimingRecord]], reference: str) -> "GainReport":
        ref = configs[reference]
        names = [reference] + [n for n in configs if n != reference]
        return cls(
            names=names,
            per_query={n: per_query_means(configs[n]) for n in names},
            gains={n: compute_gain(ref, configs[n]) for n in names},
            mean_gains={n: mean_query_gain(ref, configs[n]) for n in names},
        )

    def query_ids(self) -> list[str]:
        return list(self.per_query[self.names[0]])

    def render_text(self) -> str:
        head = ["query"] + self.names
        body = [[q] + [f"{self.per_query[n][q]:.0f}" for n in self.names] for q in self.query_ids()]
        body.append(["total"] + [f"{sum(self.per_query[n].values()):.0f}" for n in self.names])
        body.append(["gain"] + [f"{100 * self.gains[n]:.1f}%" for n in self.names])
        body.append(["mean query gain"] + [f"{100 * self.mean_gains[n]:.1f}%" for n in self.names])
        widths = [max(len(r[i]) for r in [head] + body) for i in range(len(head))]
        fmt = lambda row: "  ".join(  # noqa: E731
            c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths))
        )
        return "\n".join([fmt(head), "  ".join("-" * w for w in widths)] + [fmt(r) for r in body]) + "\n"

    def render_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["configuration", "total_ms", "gain", "mean_query_gain"])
        for n in self.names:
            w.writerow([n, f"{sum(self.per_query[n].values()):.3f}", f"{self.gains[n]:.6f}", f"{self.mean_gains[n]:.6f}"])
        return buf.getvalue()
