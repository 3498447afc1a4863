import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dwbench.model import HighLevelParams, SchemaKind, validate_low_level
from dwbench.presets import DW1, DW2, DW3
from dwbench.rng import RandomSource
from dwbench.schema import (
    MEASURE_TEXT_BYTES,
    InvalidParameters,
    Layout,
    build_schema,
    derive_low_level,
    estimate_size,
    mean_digits,
    schema_source,
    skewed_mean_digits,
)

from conftest import small_low


def test_default_high_level_without_spread():
    low = derive_low_level(HighLevelParams(), RandomSource(0), spread_ratio=0)
    assert low.nb_ft == 1
    assert low.nb_dim == (5,)
    assert low.tot_nb_dim == 5
    assert low.nb_meas == (5,)
    assert low.density == (0.6,)
    assert low.nb_levels == (3,) * 5
    assert low.nb_att == ((5, 5, 5),) * 5
    assert low.hhlevel_size == (10,) * 5
    assert low.dim_sfactor == (10,) * 5


def test_derived_nb_levels_mean():
    src = RandomSource(17, "parameters")
    levels = []
    for _ in range(10**4):
        levels.extend(derive_low_level(HighLevelParams(), src).nb_levels)
    assert abs(np.mean(levels) - 3.0) <= 0.1


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_derived_parameters_always_validate(seed):
    low = derive_low_level(HighLevelParams(avg_nb_ft=2, avg_nb_dim=4, avg_tot_nb_dim=3), RandomSource(seed), 0.5)
    assert validate_low_level(low) == []


def test_dw1_cardinalities():
    assert DW1.level_cardinalities(0) == [18, 324]
    assert DW1.level_cardinalities(1) == [18, 324, 5832]
    schema = build_schema(DW1, schema_source(0))
    assert schema.kind is SchemaKind.SNOWFLAKE
    assert schema.fact_tables[0].entry_tables == ("DIM1_2", "DIM2_3")
    assert len(schema.table_names()) == 6


def test_dw3_is_star():
    schema = build_schema(DW3, schema_source(0))
    assert schema.kind is SchemaKind.STAR
    assert schema.table_names() == ["DIM1_1", "DIM2_1", "DIM3_1", "FT1"]


def test_table_order_is_topological():
    schema = build_schema(DW2, schema_source(0))
    names = schema.table_names()
    for t in names:
        for a in schema.attributes(t):
            if a.referenced_table:
                assert names.index(a.referenced_table) < names.index(t)


def test_build_schema_rejects_invalid():
    from dataclasses import replace

    with pytest.raises(InvalidParameters) as err:
        build_schema(replace(DW1, density=(0.0,)), schema_source(0))
    assert err.value.violations[0].field == "DENSITY(1)"


def test_schema_deterministic():
    low = small_low(5)
    assert build_schema(low, schema_source(5)).fingerprint() == build_schema(low, schema_source(5)).fingerprint()


def test_fact_rows_expectation():
    est = estimate_size(DW1)
    assert est.table("FT1").rows == pytest.approx(1_133_740.8)
    assert est.table("DIM2_3").rows == 5832


def test_density_one_full_product():
    from dataclasses import replace

    low = replace(DW3, nb_dim=(2,), tot_nb_dim=2, density=(1.0,), nb_levels=(1, 1), nb_att=((1,), (1,)),
                  hhlevel_size=(3, 4), dim_sfactor=(None, None))
    assert estimate_size(low).table("FT1").rows == 12


def test_storage_layout_widths():
    est = estimate_size(DW3, Layout.STORAGE)
    # three keys and five measures, four bytes each
    assert est.table("FT1").row_bytes == 32
    # key plus five descriptors "DIM1_1_DESCRk" (13 chars) + "_" + 20
    assert est.table("DIM1_1").row_bytes == 4 + 5 * 34


def test_mean_digits_oracle():
    for n in (1, 9, 10, 99, 100, 5832):
        assert mean_digits(n) == pytest.approx(np.mean([len(str(k)) for k in range(1, n + 1)]))


def test_skewed_mean_digits_oracle():
    idx = RandomSource(1).skewed_indices(324, 200_000)
    sample = np.mean([len(str(k)) for k in idx.tolist()])
    assert skewed_mean_digits(324) == pytest.approx(sample, abs=0.01)


def test_measure_text_bytes():
    vals = np.random.default_rng(2).uniform(0, 10_000, 200_000).astype(np.float32)
    mean_len = np.mean([len(f"{v:.6g}") for v in vals.tolist()])
    assert mean_len == pytest.approx(MEASURE_TEXT_BYTES, abs=0.02)


def test_estimate_overflow():
    from dataclasses import replace

    huge = replace(DW3, hhlevel_size=(10**7, 10**7, 10**7))
    with pytest.raises(OverflowError):
        estimate_size(huge)


def test_estimate_without_schema_is_upper_bound():
    for seed in range(20):
        low = small_low(seed)
        schema = build_schema(low, schema_source(seed))
        exact = estimate_size(low, schema=schema).total_bytes
        assert estimate_size(low).total_bytes >= exact - 1e-6


def test_dimension_refs_are_distinct():
    for seed in range(50):
        low = small_low(seed)
        schema = build_schema(low, schema_source(seed))
        for ft in schema.fact_tables:
            assert len(set(ft.dimension_refs)) == len(ft.dimension_refs)
        assert all(1 <= d <= low.tot_nb_dim for ft in schema.fact_tables for d in ft.dimension_refs)


def test_single_fact_references_every_dimension():
    for seed in range(20):
        schema = build_schema(DW2, schema_source(seed))
        assert schema.fact_tables[0].dimension_refs == (1, 2, 3, 4)
        assert schema.shared_dimensions() == set()
