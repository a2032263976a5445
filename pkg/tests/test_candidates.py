import numpy as np
import pytest

import mlconstructive as mc
from mlconstructive.candidates import (
    build_candidate_lists,
    build_promising_list,
    default_k,
    promising_list_csv,
)

from oracles import row_sorted_neighbors


def test_triangle_candidate_list(triangle):
    cls = build_candidate_lists(triangle, 2)
    assert cls.row(0) == [(1, 3), (2, 4)]


def test_first_neighbor_is_row_minimum():
    rng = np.random.default_rng(10)
    inst = mc.from_coords(rng.random((40, 2)))
    cls = build_candidate_lists(inst)
    m = inst.cost_matrix()
    for i in range(inst.n):
        off_diag = np.delete(m[i], i)
        assert cls.costs[i, 0] == off_diag.min()


def test_lists_match_brute_force_row_sort():
    rng = np.random.default_rng(11)
    inst = mc.from_coords(rng.random((50, 2)) * 100)
    cls = build_candidate_lists(inst, 30)
    for i in range(inst.n):
        assert cls.neighbors[i].tolist() == row_sorted_neighbors(inst, i, 30)


def test_lists_sorted_with_index_tiebreak():
    # integer grid forces many equal costs
    coords = [(x, y) for x in range(6) for y in range(6)]
    inst = mc.from_coords(coords)
    cls = build_candidate_lists(inst, 10)
    for i in range(inst.n):
        row = cls.row(i)
        for (j1, c1), (j2, c2) in zip(row, row[1:]):
            assert (c1, j1) < (c2, j2)
        assert len({j for j, _ in row}) == len(row)
        assert i not in {j for j, _ in row}


def test_default_k_degenerates_on_small_instances():
    assert default_k(100) == 30
    assert default_k(10) == 9


def test_k_out_of_range(triangle):
    with pytest.raises(ValueError):
        build_candidate_lists(triangle, 5)


def test_cost_evaluation_budget():
    rng = np.random.default_rng(12)
    inst = mc.from_coords(rng.random((80, 2)))
    cls = build_candidate_lists(inst)
    assert cls.cost_evaluations <= inst.n * (inst.n - 1)


def test_promising_list_k3_has_all_edges(triangle):
    cls = build_candidate_lists(triangle, 2)
    entries = build_promising_list(cls, 2)
    pairs = {(min(e.i, e.j), max(e.i, e.j)) for e in entries}
    assert pairs == {(0, 1), (0, 2), (1, 2)}
    assert len(entries) == 3


def test_duplicate_edge_kept_at_smallest_position():
    # (0,1) is position 1 in both CLs; kept once, owned by vertex 0
    inst = mc.from_coords([(0, 0), (1, 0), (10, 0), (0, 10)])
    cls = build_candidate_lists(inst)
    entries = build_promising_list(cls, 2)
    hits = [e for e in entries if {e.i, e.j} == {0, 1}]
    assert len(hits) == 1
    assert hits[0].position == 1
    assert hits[0].i == 0


def test_promising_list_sorted_blocks():
    rng = np.random.default_rng(13)
    inst = mc.from_coords(rng.random((200, 2)))
    cls = build_candidate_lists(inst)
    entries = build_promising_list(cls, 2)
    keys = [(e.position, e.cost, e.i, e.j) for e in entries]
    assert keys == sorted(keys)
    first_block = [e for e in entries if e.position == 1]
    assert entries[: len(first_block)] == first_block


def test_promising_list_size_bounds():
    rng = np.random.default_rng(14)
    for n in (3, 10, 57, 120):
        inst = mc.from_coords(rng.random((n, 2)))
        cls = build_candidate_lists(inst)
        entries = build_promising_list(cls, 2)
        assert n <= len(entries) <= 2 * n
        for m in range(1, min(5, cls.k) + 1):
            assert len(build_promising_list(cls, m)) <= m * n


def test_m_out_of_range(triangle):
    cls = build_candidate_lists(triangle, 2)
    with pytest.raises(ValueError):
        build_promising_list(cls, 3)


def test_csv_dump_shape():
    inst = mc.from_coords([(0, 0), (1, 0), (0, 1), (2, 2)])
    cls = build_candidate_lists(inst)
    entries = build_promising_list(cls, 2)
    csv = promising_list_csv(entries)
    lines = csv.strip().splitlines()
    assert lines[0] == "i,j,position,cost"
    assert len(lines) == len(entries) + 1
