import random

import networkx as nx
import pytest

from mlconstructive.fragments import PartialSolution, Verdict


def build_path(ps, verts):
    for a, b in zip(verts, verts[1:]):
        ps.accept_edge(a, b)


def test_inner_loop_detected():
    ps = PartialSolution(5)
    build_path(ps, [0, 1, 2])
    assert ps.check_feasible(0, 2) is Verdict.INNER_LOOP


def test_hamiltonian_close_allowed():
    ps = PartialSolution(5)
    build_path(ps, [0, 1, 2, 3, 4])
    assert ps.t == 4
    assert ps.check_feasible(0, 4) is Verdict.OK
    ps.accept_edge(0, 4)
    assert ps.is_complete()
    assert ps.free_vertices() == []


def test_degree_violation():
    ps = PartialSolution(5)
    build_path(ps, [0, 1, 2])
    assert ps.check_feasible(1, 3) is Verdict.DEGREE_VIOLATION


def test_degree_checked_before_tracker():
    # an edge into a fragment interior must never reach tracker logic
    ps = PartialSolution(6)
    build_path(ps, [0, 1, 2, 3])
    probes_before = ps.probe_count
    assert ps.check_feasible(2, 4) is Verdict.DEGREE_VIOLATION
    assert ps.probe_count == probes_before


def test_self_loop_rejected():
    ps = PartialSolution(4)
    with pytest.raises(ValueError):
        ps.check_feasible(2, 2)


def test_accept_requires_ok():
    ps = PartialSolution(5)
    build_path(ps, [0, 1, 2])
    with pytest.raises(ValueError):
        ps.accept_edge(0, 2)


def test_new_fragment_mates():
    ps = PartialSolution(10)
    ps.accept_edge(3, 7)
    assert ps.mate[3] == 7
    assert ps.mate[7] == 3


def test_join_event_mates():
    ps = PartialSolution(6)
    ps.accept_edge(0, 1)
    ps.accept_edge(2, 3)
    ps.accept_edge(1, 2)
    assert ps.mate[0] == 3
    assert ps.mate[3] == 0


def test_free_vertices():
    ps = PartialSolution(4)
    assert ps.free_vertices() == [0, 1, 2, 3]
    build_path(ps, [0, 1, 2])
    assert ps.free_vertices() == [0, 2, 3]


def test_fragment_count_matches_degree_one_vertices():
    rng = random.Random(0)
    for _ in range(50):
        n = rng.randint(4, 12)
        ps = PartialSolution(n)
        while ps.t < n - 1:
            i, j = rng.sample(range(n), 2)
            if (min(i, j), max(i, j)) in ps.edges:
                continue
            if ps.check_feasible(i, j) is Verdict.OK:
                ps.accept_edge(i, j)
            deg1 = sum(1 for v in range(n) if ps.degree[v] == 1)
            assert ps.fragment_count() == deg1 // 2


def cycle_free(ps):
    g = nx.Graph()
    g.add_nodes_from(range(ps.n))
    g.add_edges_from(ps.edges)
    return nx.is_forest(g)


def test_random_feasible_sequences_never_cycle():
    rng = random.Random(1)
    for _ in range(300):
        n = rng.randint(4, 12)
        ps = PartialSolution(n)
        while ps.t < n - 1:
            i, j = rng.sample(range(n), 2)
            if (min(i, j), max(i, j)) in ps.edges:
                continue
            if ps.check_feasible(i, j) is Verdict.OK:
                ps.accept_edge(i, j)
                assert cycle_free(ps)
        # a Hamiltonian path remains; exactly one legal close exists
        g = nx.Graph(ps.edges)
        assert nx.is_connected(g)
        ends = [v for v in range(n) if ps.degree[v] == 1]
        assert len(ends) == 2
        assert ps.check_feasible(*ends) is Verdict.OK
        ps.accept_edge(*ends)
        assert ps.is_complete()
        assert len(ps.tour_order()) == n


def test_scan_tracker_agrees_with_mate_map():
    rng = random.Random(2)
    for _ in range(30):
        n = rng.randint(4, 10)
        fast = PartialSolution(n)
        scan = PartialSolution(n, use_scan_tracker=True)
        while fast.t < n:
            i, j = rng.sample(range(n), 2)
            if (min(i, j), max(i, j)) in fast.edges:
                continue
            vf = fast.check_feasible(i, j)
            vs = scan.check_feasible(i, j)
            assert vf == vs
            if vf is Verdict.OK:
                fast.accept_edge(i, j)
                scan.accept_edge(i, j)


def test_mate_map_is_involution_on_endpoints():
    rng = random.Random(3)
    for _ in range(40):
        n = rng.randint(4, 12)
        ps = PartialSolution(n)
        while ps.t < n - 1:
            i, j = rng.sample(range(n), 2)
            if (min(i, j), max(i, j)) in ps.edges:
                continue
            if ps.check_feasible(i, j) is Verdict.OK:
                ps.accept_edge(i, j)
            for v in range(n):
                if ps.degree[v] == 1:
                    assert ps.mate[ps.mate[v]] == v


def test_n3_every_order_gives_unique_tour():
    import itertools

    for perm in itertools.permutations([(0, 1), (1, 2), (0, 2)]):
        ps = PartialSolution(3)
        for i, j in perm:
            assert ps.check_feasible(i, j) is Verdict.OK
            ps.accept_edge(i, j)
        assert ps.is_complete()
