"""End-to-end runs: parameters -> schema -> data -> files."""

from __future__ import annotations

import logging
from dataclasses import asdict
from pathlib import Path

from .config import RunConfig
from .datagen import generate_warehouse
from .emit import emit_data, emit_ddl, emit_workload, read_manifest, workload_params_dict, write_manifest
from .model import LowLevelParams, SchemaModel, WorkloadParams
from .rng import RandomSource, StringReferential
from .schema import build_schema, derive_low_level, estimate_size, schema_source
from .workload import Workload, generate_workload

log = logging.getLogger(__name__)


def resolve_low(cfg: RunConfig) -> LowLevelParams:
    if cfg.low is not None:
        return cfg.low
    return derive_low_level(cfg.high, RandomSource(cfg.seed, "parameters"), cfg.spread_ratio)


def build(cfg: RunConfig) -> tuple[LowLevelParams, SchemaModel]:
    low = resolve_low(cfg)
    return low, build_schema(low, schema_source(cfg.seed))


def write_workload(out_dir: Path, schema: SchemaModel, params: WorkloadParams, seed: int, spread_ratio: float) -> Workload:
    wl = generate_workload(schema, params, seed, StringReferential.from_seed(seed), spread_ratio)
    (Path(out_dir) / "workload.sql").write_text(emit_workload(wl))
    return wl


def generate(cfg: RunConfig) -> dict:
    """Generate warehouse files and workload under ``cfg.out``; returns the manifest."""
    low, schema = build(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    log.info("generating %s schema with %d tables", schema.kind.value, len(schema.table_names()))

    ddl = emit_ddl(schema)
    (out / "schema.sql").write_text(ddl)
    wh = generate_warehouse(schema, cfg.seed, workers=cfg.workers)
    sizes = emit_data(wh, out, cfg.fmt, workers=cfg.workers)
    wl = write_workload(out, schema, cfg.workload, cfg.seed, cfg.spread_ratio)

    est = estimate_size(low, schema=schema)
    manifest = {
        "seed": cfg.seed,
        "spread_ratio": cfg.spread_ratio,
        "preset": cfg.preset,
        "high_level": {k.upper(): v for k, v in asdict(cfg.high).items()} if cfg.high else None,
        "low_level": low.to_dict(),
        "workload": workload_params_dict(cfg.workload),
        "format": cfg.fmt,
        "schema_kind": schema.kind.value,
        "schema_fingerprint": schema.fingerprint(),
        "tables": {name: {"rows": len(wh.tables[name]), "bytes": sizes[name]} for name in schema.table_names()},
        "data_bytes": sum(sizes.values()),
        "estimated_data_bytes": round(est.total_bytes),
        "workload_queries": len(wl),
    }
    write_manifest(out, manifest)
    return manifest


def regenerate_workload(out_dir: Path, params: WorkloadParams | None = None, seed: int | None = None) -> Workload:
    """Rewrite ``out_dir``/workload.sql for the warehouse its manifest describes."""
    manifest = read_manifest(out_dir)
    low = LowLevelParams.from_dict(manifest["low_level"])
    schema = build_schema(low, schema_source(manifest["seed"]))
    if schema.fingerprint() != manifest["schema_fingerprint"]:
        raise ValueError("manifest schema fingerprint does not match the rebuilt schema")
    if params is None:
        params = WorkloadParams(**{k.lower(): v for k, v in manifest["workload"].items()})
    # literals must come from the warehouse's referential, so it keys on the data seed
    wl_seed = manifest["seed"] if seed is None else seed
    wl = generate_workload(
        schema, params, wl_seed, StringReferential.from_seed(manifest["seed"]), manifest["spread_ratio"]
    )
    (Path(out_dir) / "workload.sql").write_text(emit_workload(wl))
    return wl
