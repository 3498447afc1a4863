import itertools
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dwbench.datagen import (
    MEASURE_HIGH,
    ProductTooLarge,
    data_source,
    generate_fact_table,
    generate_warehouse,
)
from dwbench.model import AttributeKind
from dwbench.presets import DW3
from dwbench.schema import build_schema, schema_source

from conftest import small_low


def tiny_star(density=1.0, sizes=(3, 4)):
    return replace(
        DW3,
        nb_dim=(len(sizes),),
        tot_nb_dim=len(sizes),
        density=(density,),
        nb_levels=(1,) * len(sizes),
        nb_att=((2,),) * len(sizes),
        hhlevel_size=tuple(sizes),
        dim_sfactor=(None,) * len(sizes),
    )


def test_full_density_is_cartesian_product():
    low = tiny_star()
    wh = generate_warehouse(build_schema(low, schema_source(0)), 0)
    ft = wh["FT1"]
    assert len(ft) == 12
    got = list(zip(ft.column("DIM1_1_PK").tolist(), ft.column("DIM2_1_PK").tolist()))
    assert got == list(itertools.product(range(1, 4), range(1, 5)))


def test_dimension_row_counts(dw1_small):
    low, schema = dw1_small
    wh = generate_warehouse(schema, 1)
    counts = wh.row_counts()
    for d in range(low.tot_nb_dim):
        for h, card in enumerate(low.level_cardinalities(d)):
            assert counts[f"DIM{d + 1}_{h + 1}"] == card
    for lv in schema.levels:
        assert wh[lv.table_name].column(lv.primary_key).tolist() == list(range(1, lv.cardinality + 1))


def test_foreign_keys_in_range(dw1_small):
    _, schema = dw1_small
    wh = generate_warehouse(schema, 2)
    for table in schema.table_names():
        for a in schema.attributes(table):
            if a.kind is AttributeKind.FOREIGN_KEY:
                ref = wh[a.referenced_table].column(a.name)
                col = wh[table].column(a.name)
                assert col.min() >= ref.min() and col.max() <= ref.max()


def test_fact_keys_unique_and_sorted(dw1_small):
    _, schema = dw1_small
    ft = generate_warehouse(schema, 3)["FT1"]
    keys = list(zip(*(ft.column(k).tolist() for k in schema.fact_tables[0].foreign_keys)))
    assert len(set(keys)) == len(keys)
    assert keys == sorted(keys)


def test_brute_force_oracle():
    # oracle: walk the product with itertools and flip the same coins
    low = tiny_star(density=0.4, sizes=(7, 5, 6))
    schema = build_schema(low, schema_source(9))
    wh = generate_warehouse(schema, 9)
    coins = data_source(9).substream("FT1").random(7 * 5 * 6)
    expected = [c for c, u in zip(itertools.product(range(1, 8), range(1, 6), range(1, 7)), coins) if u < 0.4]
    ft = wh["FT1"]
    got = list(zip(*(ft.column(k).tolist() for k in schema.fact_tables[0].foreign_keys)))
    assert got == expected


def test_density_matches_delete_oracle():
    # generating all tuples then deleting each with probability 1 - density
    # gives Binomial(N, density) rows; check mean and spread over many seeds
    low = tiny_star(density=0.3, sizes=(10, 10))
    schema = build_schema(low, schema_source(0))
    dims = [generate_warehouse(schema, 0)[t] for t in schema.fact_tables[0].entry_tables]
    counts = np.array([len(generate_fact_table(schema.fact_tables[0], dims, data_source(s))) for s in range(2000)])
    assert abs(counts.mean() - 30) < 4 * math.sqrt(100 * 0.3 * 0.7 / 2000)
    assert counts.std() == pytest.approx(math.sqrt(100 * 0.3 * 0.7), rel=0.1)


def test_measures_in_range(dw1_small):
    _, schema = dw1_small
    ft = generate_warehouse(schema, 4)["FT1"]
    for m in schema.fact_tables[0].measures:
        col = ft.column(m)
        assert col.dtype == np.float32
        assert col.min() >= 0 and col.max() < MEASURE_HIGH
        sigma = MEASURE_HIGH / math.sqrt(12 * len(col))
        assert abs(col.mean() - MEASURE_HIGH / 2) < 4 * sigma


def test_descriptors_carry_attribute_prefix(dw1_small):
    _, schema = dw1_small
    wh = generate_warehouse(schema, 5)
    for lv in schema.levels:
        for name in lv.descriptors:
            vals = wh[lv.table_name].column(name)
            assert all(v.startswith(name + "_") and len(v) == len(name) + 21 for v in vals)


def test_hierarchy_links_are_skewed():
    low = replace(tiny_star(sizes=(1,)), nb_levels=(2,), nb_att=((1, 1),), hhlevel_size=(50,), dim_sfactor=(400,))
    wh = generate_warehouse(build_schema(low, schema_source(0)), 0)
    parents = np.bincount(wh["DIM1_2"].column("DIM1_1_PK"), minlength=51)
    assert parents[24:28].mean() >= 2 * parents[1:5].mean()


def test_product_cap():
    low = tiny_star(sizes=(100, 100))
    schema = build_schema(low, schema_source(0))
    with pytest.raises(ProductTooLarge) as err:
        generate_warehouse(schema, 0, cap=5000)
    assert err.value.combinations == 10_000
    assert "10000" in str(err.value)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_parallel_equals_serial(seed):
    low = small_low(seed, max_combinations=3000)
    schema = build_schema(low, schema_source(seed))
    a = generate_warehouse(schema, seed)
    b = generate_warehouse(schema, seed, workers=4)
    assert a.tables.keys() == b.tables.keys()
    for name in a.tables:
        for x, y in zip(a[name].data, b[name].data):
            assert np.array_equal(x, y)


def test_seed_changes_data(dw1_small):
    _, schema = dw1_small
    a, b = generate_warehouse(schema, 1)["FT1"], generate_warehouse(schema, 2)["FT1"]
    assert len(a) != len(b) or not np.array_equal(a.data[-1], b.data[-1])
