"""The three reference warehouses DW1 (snowflake), DW2 (snowflake), DW3 (star)."""

from __future__ import annotations

from dataclasses import replace

from .model import LowLevelParams, WorkloadParams

DW1 = LowLevelParams(
    nb_ft=1,
    nb_dim=(2,),
    tot_nb_dim=2,
    nb_meas=(5,),
    density=(0.6,),
    nb_levels=(2, 3),
    nb_att=((5, 5), (4, 4, 4)),
    hhlevel_size=(18, 18),
    dim_sfactor=(18, 18),
)

DW2 = LowLevelParams(
    nb_ft=1,
    nb_dim=(4,),
    tot_nb_dim=4,
    nb_meas=(3,),
    density=(0.25,),
    nb_levels=(1, 2, 3, 3),
    nb_att=((4,), (2, 3), (3, 3, 2), (2, 2, 3)),
    hhlevel_size=(8, 8, 8, 8),
    dim_sfactor=(None, 5, 5, 5),
)

DW3 = LowLevelParams(
    nb_ft=1,
    nb_dim=(3,),
    tot_nb_dim=3,
    nb_meas=(5,),
    density=(0.8,),
    nb_levels=(1, 1, 1),
    nb_att=((5,), (5,), (5,)),
    hhlevel_size=(100, 100, 70),
    dim_sfactor=(None, None, None),
)

PRESETS = {"dw1": DW1, "dw2": DW2, "dw3": DW3}

PRESET_WORKLOAD = WorkloadParams(nb_q=20)


def scaled(low: LowLevelParams, hhlevel_size: int, dim_sfactor: int) -> LowLevelParams:
    """Same shape as ``low`` with every dimension resized, for quick runs."""
    return replace(
        low,
        hhlevel_size=(hhlevel_size,) * low.tot_nb_dim,
        dim_sfactor=tuple(None if n == 1 else dim_sfactor for n in low.nb_levels),
    )
