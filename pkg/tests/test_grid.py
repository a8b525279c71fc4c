import json

import numpy as np
import pytest

from medosc.grid import (
    Domain,
    DyadicCube,
    GridCube,
    GridError,
    GridFunction,
    ParseError,
    Weight,
    average,
    cells,
    enumerate_cubes,
    grid_function_from_dict,
    read_grid_function,
    write_grid_function,
)


def f1(values, level=None, domain=None):
    values = np.asarray(values, dtype=float)
    if level is None:
        level = int(np.log2(values.size))
    return GridFunction(1, level, values, domain)


def test_values_length_enforced():
    with pytest.raises(GridError):
        GridFunction(1, 2, np.array([0.0, 0.0, 1.0]))


def test_nonfinite_rejected():
    with pytest.raises(GridError):
        GridFunction(1, 1, np.array([0.0, np.nan]))


def test_weight_rejects_negative():
    with pytest.raises(GridError):
        Weight(1, 1, np.array([1.0, -0.5]))


def test_cells_dyadic_halving():
    f = f1(np.zeros(8))
    assert cells(DyadicCube(1, (1,)), f) == [(4,), (5,), (6,), (7,)]


def test_cells_contiguous_range():
    f = f1(np.zeros(8))
    assert cells(GridCube(offset=(2,), side=3), f) == [(2,), (3,), (4,)]


def test_cells_2d_root():
    f = GridFunction(2, 1, np.zeros(4))
    assert cells(DyadicCube(0, (0, 0)), f) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_out_of_domain_cube_rejected():
    f = f1(np.zeros(4))
    with pytest.raises(GridError):
        cells(GridCube(offset=(3,), side=2), f)


def test_average_constant():
    f = f1(np.full(8, 3.25))
    for q in enumerate_cubes(f):
        assert average(f, q) == 3.25


def test_average_symmetric_and_partial():
    f = f1([0, 0, 1, 1])
    assert average(f, f.full_cube()) == 0.5
    g = f1([1, 2, 3, 4])
    assert average(g, GridCube(offset=(1,), side=2)) == 2.5


def test_average_matches_direct_sum_oracle():
    rng = np.random.default_rng(7)
    f = f1(rng.uniform(-1, 1, 16))
    for q in enumerate_cubes(f):
        vals = [f.values[c[0]] for c in cells(q, f)]
        assert average(f, q) == pytest.approx(sum(vals) / len(vals), abs=1e-12)


def test_dyadic_count():
    f = f1(np.zeros(4))
    assert sum(1 for _ in enumerate_cubes(f, mode="dyadic")) == 7


def test_grid_aligned_interval_count():
    f = f1(np.zeros(4))
    assert sum(1 for _ in enumerate_cubes(f, mode="grid-aligned")) == 10
    g = f1(np.zeros(16))
    n = g.n
    assert sum(1 for _ in enumerate_cubes(g)) == n * (n + 1) // 2


def test_grid_aligned_containing_cell():
    f = f1(np.zeros(4))
    got = list(enumerate_cubes(f, containing=(0,)))
    # direct enumeration oracle: intervals [o, o+s) with o <= 0 < o+s
    expect = [
        GridCube((o,), s)
        for s in range(1, 5)
        for o in range(0, 4 - s + 1)
        if o <= 0 < o + s
    ]
    assert got == expect
    assert len(got) == 4


def test_enumeration_duplicate_free_and_disjoint_cells():
    f = GridFunction(2, 2, np.zeros(16))
    seen = set()
    for q in enumerate_cubes(f):
        assert q not in seen
        seen.add(q)
    a = GridCube((0, 0), 2)
    b = GridCube((2, 2), 2)
    assert not set(cells(a, f)) & set(cells(b, f))


def test_measure_additivity():
    f = GridFunction(2, 3, np.zeros(64))
    for q in enumerate_cubes(f, mode="dyadic"):
        g = q
        if g.side > 1:
            from medosc.grid import _dyadic_children

            kids = _dyadic_children(g)
            assert sum(k.measure(f) for k in kids) == pytest.approx(g.measure(f))


def test_parent_average_is_mean_of_children_averages():
    rng = np.random.default_rng(8)
    f = GridFunction(2, 3, rng.normal(size=64))
    from medosc.grid import _dyadic_children

    for q in enumerate_cubes(f, mode="dyadic"):
        if q.side > 1:
            kids = _dyadic_children(q)
            mean_kids = sum(average(f, k) for k in kids) / len(kids)
            assert average(f, q) == pytest.approx(mean_kids, abs=1e-12)


def test_parent_child_roundtrip():
    q = DyadicCube(2, (1, 3))
    for k in q.children():
        assert k.parent() == q


def test_json_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    f = GridFunction(1, 3, rng.uniform(-5, 5, 8), Domain(origin=(-2.0,), side=4.0))
    p = tmp_path / "f.json"
    write_grid_function(f, p)
    g = read_grid_function(p)
    assert g == f


def test_parse_simple_document():
    f = grid_function_from_dict({"dim": 1, "level": 2, "values": [0, 0, 1, 1]})
    assert np.array_equal(f.values, [0, 0, 1, 1])
    assert f.domain.origin == (0.0,)


def test_parse_length_mismatch_names_field():
    with pytest.raises(ParseError, match="values"):
        grid_function_from_dict({"dim": 1, "level": 2, "values": [0, 0, 1]})


def test_parse_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ParseError):
        read_grid_function(p)


def test_parse_nonfinite_named(tmp_path):
    p = tmp_path / "inf.json"
    p.write_text(json.dumps({"dim": 1, "level": 1, "values": [1.0, 1e999]}))
    with pytest.raises(ParseError, match="non-finite"):
        read_grid_function(p)
