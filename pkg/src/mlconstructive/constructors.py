"""Classic tour constructors: nearest neighbor, multi-fragment, Clarke-Wright.

MF and CW share one greedy edge-scan core with the fragment tracker; CW is
the savings-ordered completion that also serves as phase two of the
two-phase driver.
"""

from __future__ import annotations

import numpy as np

from .fragments import PartialSolution, Verdict
from .instance import Instance, Tour, make_tour


def nearest_neighbor(inst: Instance, start: int = 0) -> Tour:
    """Single-fragment greedy tour; cost ties break on the smaller index."""
    n = inst.n
    if not 0 <= start < n:
        raise ValueError("start vertex out of range")
    m = inst.cost_matrix()
    visited = np.zeros(n, dtype=bool)
    order = [start]
    visited[start] = True
    cur = start
    big = np.inf
    for _ in range(n - 1):
        row = np.where(visited, big, m[cur])
        cur = int(np.argmin(row))  # argmin returns the first (smallest index) tie
        visited[cur] = True
        order.append(cur)
    return make_tour(inst, order)


def all_edges_sorted_by_cost(inst: Instance):
    """All i<j pairs sorted ascending by (cost, i, j)."""
    n = inst.n
    m = inst.cost_matrix()
    iu, ju = np.triu_indices(n, k=1)
    costs = m[iu, ju]
    order = np.lexsort((ju, iu, costs))
    return iu[order], ju[order], costs[order]


def greedy_edge_scan(ps: PartialSolution, ii, jj) -> None:
    """Accept edges from the given ordering whenever the tracker allows."""
    n = ps.n
    for i, j in zip(ii.tolist(), jj.tolist()):
        if ps.t == n:
            break
        if ps.check_feasible(i, j) is Verdict.OK:
            ps.accept_edge(i, j)


def multi_fragment(inst: Instance, ps: PartialSolution | None = None) -> Tour:
    """Cheapest-edge-first greedy construction."""
    if ps is None:
        ps = PartialSolution(inst.n)
    ii, jj, _ = all_edges_sorted_by_cost(inst)
    greedy_edge_scan(ps, ii, jj)
    return make_tour(inst, ps.tour_order())


def hub_vertex(inst: Instance) -> int:
    """Vertex with the smallest total distance to all others (ties: index)."""
    td = inst.cost_matrix().sum(axis=1)
    return int(np.argmin(td))


def saving(inst: Instance, h: int, i: int, j: int):
    """Gain of the direct edge (i, j) over routing through hub h."""
    m = inst.cost_matrix()
    ci = 0 if i == h else m[i, h]
    cj = 0 if j == h else m[h, j]
    return ci + cj - m[i, j]


def savings_completion(inst: Instance, ps: PartialSolution) -> Tour:
    """Complete a partial solution greedily by descending Clarke-Wright saving.

    Considers all edges among currently free vertices (hub included when
    free); saving ties break by ascending cost, then lexicographic pair.
    """
    n = inst.n
    if ps.t == n:
        return make_tour(inst, ps.tour_order())
    m = inst.cost_matrix()
    h = hub_vertex(inst)
    free = np.array(ps.free_vertices())
    fi, fj = np.triu_indices(len(free), k=1)
    ii, jj = free[fi], free[fj]
    c_ih = np.where(ii == h, 0, m[ii, h])
    c_hj = np.where(jj == h, 0, m[h, jj])
    cost = m[ii, jj]
    s = c_ih + c_hj - cost
    order = np.lexsort((jj, ii, cost, -s))
    greedy_edge_scan(ps, ii[order], jj[order])
    if not ps.is_complete():
        raise AssertionError("savings completion failed to close the tour")
    return make_tour(inst, ps.tour_order())


def clarke_wright(inst: Instance) -> Tour:
    """Stand-alone CW constructor: the savings completion from scratch."""
    return savings_completion(inst, PartialSolution(inst.n))
