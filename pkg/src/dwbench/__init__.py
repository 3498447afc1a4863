"""Synthetic data warehouse benchmark: schemas, skewed data, OLAP workloads, timing."""

from .datagen import TableExtension, Warehouse, generate_fact_table, generate_dimension, generate_warehouse
from .emit import emit_data, emit_ddl, emit_workload, read_workload
from .executor import TimingRecord, compute_gain, export_timings, read_timings, run_workload
from .model import (
    HighLevelParams,
    LowLevelParams,
    SchemaKind,
    SchemaModel,
    WorkloadParams,
    classify,
    validate_low_level,
)
from .presets import DW1, DW2, DW3, PRESETS
from .query import QueryAst, render_sql
from .rng import RandomSource, StringReferential
from .schema import build_schema, derive_low_level, estimate_size
from .sqlgrammar import check_grammar, parse_query
from .workload import Workload, generate_workload

__version__ = "0.1.0"

__all__ = [
    "TableExtension",
    "Warehouse",
    "generate_fact_table",
    "generate_dimension",
    "generate_warehouse",
    "emit_data",
    "emit_ddl",
    "emit_workload",
    "read_workload",
    "TimingRecord",
    "compute_gain",
    "export_timings",
    "read_timings",
    "run_workload",
    "HighLevelParams",
    "LowLevelParams",
    "SchemaKind",
    "SchemaModel",
    "WorkloadParams",
    "classify",
    "validate_low_level",
    "DW1",
    "DW2",
    "DW3",
    "PRESETS",
    "QueryAst",
    "render_sql",
    "RandomSource",
    "StringReferential",
    "build_schema",
    "derive_low_level",
    "estimate_size",
    "check_grammar",
    "parse_query",
    "Workload",
    "generate_workload",
]
