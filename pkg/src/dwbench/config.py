"""Run configuration from an INI-style file and/or command-line flags.

Exactly one of the ``[high]``, ``[low]`` or ``[preset]`` sections defines the
warehouse. Keys use the parameter names (``AVG_NB_DIM``, ``NB_LEVELS``,
``PROB_CUBE``...). Per-dimension lists are comma separated; ``NB_ATT`` gives
one ``/``-separated list of levels per dimension, e.g. ``5/5, 4/4/4``. A single
value is broadcast to every fact table, dimension or level.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields
from pathlib import Path

from .model import DERIVED_WORKLOAD_PARAMS, HighLevelParams, LowLevelParams, WorkloadParams
from .presets import PRESET_WORKLOAD, PRESETS
from .rng import DEFAULT_SPREAD_RATIO


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    high: HighLevelParams | None = None
    low: LowLevelParams | None = None
    preset: str | None = None
    workload: WorkloadParams = field(default_factory=WorkloadParams)
    seed: int = 0
    out: Path = Path("out")
    fmt: str = "dat"
    spread_ratio: float = DEFAULT_SPREAD_RATIO
    workers: int = 1


def _number(text: str, key: str):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        try:
            return float(text)
        except ValueError:
            raise ConfigError(f"{key}: not a number: {text!r}") from None


def _int(text: str, key: str) -> int:
    value = _number(text, key)
    if not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {text!r}")
    return value


def _broadcast(values: list, n: int, key: str) -> tuple:
    if len(values) == 1:
        return tuple(values) * n
    if len(values) != n:
        raise ConfigError(f"{key}: expected 1 or {n} values, got {len(values)}")
    return tuple(values)


def _section_dict(section) -> dict[str, str]:
    return {k.upper(): v for k, v in section.items()}


def parse_high(section: dict[str, str]) -> HighLevelParams:
    known = {f.name.upper(): f.name for f in fields(HighLevelParams)}
    kwargs = {}
    for key, value in section.items():
        if key not in known:
            raise ConfigError(f"[high]: unknown parameter {key}")
        kwargs[known[key]] = _number(value, key)
    try:
        return HighLevelParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


LOW_KEYS = ("NB_FT", "NB_DIM", "TOT_NB_DIM", "NB_MEAS", "DENSITY", "NB_LEVELS", "NB_ATT", "HHLEVEL_SIZE", "DIM_SFACTOR")


def parse_low(section: dict[str, str]) -> LowLevelParams:
    unknown = set(section) - set(LOW_KEYS)
    if unknown:
        raise ConfigError(f"[low]: unknown parameter {sorted(unknown)[0]}")
    missing = [k for k in LOW_KEYS if k not in section and k != "DIM_SFACTOR"]
    if missing:
        raise ConfigError(f"[low]: missing {', '.join(missing)}")

    def ints(key):
        return [_int(v, key) for v in section[key].split(",")]

    nb_ft = _int(section["NB_FT"], "NB_FT")
    tot = _int(section["TOT_NB_DIM"], "TOT_NB_DIM")
    nb_levels = _broadcast(ints("NB_LEVELS"), tot, "NB_LEVELS")
    att_specs = [[_int(x, "NB_ATT") for x in part.split("/")] for part in section["NB_ATT"].split(",")]
    att_specs = list(_broadcast(att_specs, tot, "NB_ATT"))
    nb_att = tuple(
        tuple(spec * nb_levels[d]) if len(spec) == 1 else tuple(spec) for d, spec in enumerate(att_specs)
    )
    sf_raw = [v.strip() for v in section.get("DIM_SFACTOR", "n/a").split(",")]
    sf = [None if v.lower() in ("n/a", "na", "-", "") else _int(v, "DIM_SFACTOR") for v in sf_raw]
    sf = _broadcast(sf, tot, "DIM_SFACTOR")
    return LowLevelParams(
        nb_ft=nb_ft,
        nb_dim=_broadcast(ints("NB_DIM"), nb_ft, "NB_DIM"),
        tot_nb_dim=tot,
        nb_meas=_broadcast(ints("NB_MEAS"), nb_ft, "NB_MEAS"),
        density=_broadcast([float(v) for v in section["DENSITY"].split(",")], nb_ft, "DENSITY"),
        nb_levels=nb_levels,
        nb_att=nb_att,
        hhlevel_size=_broadcast(ints("HHLEVEL_SIZE"), tot, "HHLEVEL_SIZE"),
        dim_sfactor=tuple(None if nb_levels[d] == 1 else sf[d] for d in range(tot)),
    )


def parse_workload(section: dict[str, str], base: WorkloadParams | None = None) -> WorkloadParams:
    known = {f.name.upper(): f.name for f in fields(WorkloadParams)}
    kwargs = {f.name: getattr(base, f.name) for f in fields(WorkloadParams)} if base else {}
    for key, value in section.items():
        if key in DERIVED_WORKLOAD_PARAMS:
            raise ConfigError(f"{key} is a derived parameter and cannot be set")
        if key not in known:
            raise ConfigError(f"[workload]: unknown parameter {key}")
        kwargs[known[key]] = _int(value, key) if key == "NB_Q" else _number(value, key)
    try:
        return WorkloadParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def parse_config(
    text: str | None = None,
    *,
    preset: str | None = None,
    seed: int | None = None,
    out: str | Path | None = None,
    fmt: str | None = None,
    workers: int | None = None,
) -> RunConfig:
    """Merge a config text with flag values; flags win over ``[run]`` keys."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    if text:
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from None
    sections = {s.lower(): _section_dict(cp[s]) for s in cp.sections()}
    unknown = set(sections) - {"high", "low", "preset", "workload", "run"}
    if unknown:
        raise ConfigError(f"unknown section [{sorted(unknown)[0]}]")

    if preset is not None:
        sections["preset"] = {"NAME": preset}
    chosen = [s for s in ("high", "low", "preset") if s in sections]
    if len(chosen) != 1:
        raise ConfigError(
            "exactly one of [high], [low] or a preset must define the warehouse"
            + (f" (got {', '.join(chosen)})" if chosen else "")
        )
    cfg = RunConfig()
    if "high" in sections:
        cfg.high = parse_high(sections["high"])
    elif "low" in sections:
        cfg.low = parse_low(sections["low"])
    else:
        name = sections["preset"].get("NAME", "").lower()
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}")
        cfg.preset, cfg.low = name, PRESETS[name]

    base = PRESET_WORKLOAD if cfg.preset else WorkloadParams()
    cfg.workload = parse_workload(sections.get("workload", {}), base)

    run = sections.get("run", {})
    for key in run:
        if key not in ("SEED", "OUT", "FORMAT", "SPREAD_RATIO", "WORKERS"):
            raise ConfigError(f"[run]: unknown key {key}")
    cfg.seed = seed if seed is not None else _int(run.get("SEED", "0"), "SEED")
    cfg.out = Path(out if out is not None else run.get("OUT", "out"))
    cfg.fmt = fmt or run.get("FORMAT", "dat")
    if cfg.fmt not in ("dat", "sql"):
        raise ConfigError(f"format must be dat or sql, got {cfg.fmt!r}")
    cfg.spread_ratio = float(run.get("SPREAD_RATIO", DEFAULT_SPREAD_RATIO))
    cfg.workers = workers if workers is not None else _int(run.get("WORKERS", "1"), "WORKERS")
    return cfg


def workload_section(text: str) -> WorkloadParams | None:
    """The ``[workload]`` section of a config text alone, or None if absent."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp.read_string(text)
    for name in cp.sections():
        if name.lower() == "workload":
            return parse_workload(_section_dict(cp[name]))
    return None
