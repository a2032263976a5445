"""Partial tour state: degree bookkeeping and the inner-loop tracker.

Accepted edges always form vertex-disjoint simple paths until the final
closing edge.  Same-fragment queries go through an endpoint-mate map
(O(1) per probe); a fragment-spanning scan variant is kept behind a flag
for operation-count experiments.
"""

from __future__ import annotations

from enum import Enum


class Verdict(Enum):
    OK = "ok"
    DEGREE_VIOLATION = "degree_violation"
    INNER_LOOP = "inner_loop"


class PartialSolution:
    """Growing edge set of one construction run (single writer)."""

    def __init__(self, n: int, use_scan_tracker: bool = False):
        if n < 3:
            raise ValueError("need at least 3 vertices")
        self.n = n
        self.degree = [0] * n
        self.mate = list(range(n))  # fragment endpoint -> opposite endpoint
        self.adjacent = [[] for _ in range(n)]
        self.edges: set[tuple] = set()
        self.t = 0  # accepted edge count (epoch)
        self.use_scan_tracker = use_scan_tracker
        self.probe_count = 0  # endpoint-map / scan probes, for complexity tests

    def check_feasible(self, i: int, j: int) -> Verdict:
        """Classify the addition of edge (i, j) without applying it."""
        if i == j:
            raise ValueError("self-loop edge")
        if self.degree[i] == 2 or self.degree[j] == 2:
            return Verdict.DEGREE_VIOLATION
        if self.degree[i] == 1 and self.degree[j] == 1:
            if self._same_fragment(i, j) and self.t < self.n - 1:
                return Verdict.INNER_LOOP
        return Verdict.OK

    def _same_fragment(self, i, j) -> bool:
        if self.use_scan_tracker:
            return self._scan_fragment_end(i) == j
        self.probe_count += 1
        return self.mate[i] == j

    def _scan_fragment_end(self, i):
        """Walk the fragment from endpoint i to its far end, counting probes."""
        prev, cur = None, i
        while True:
            self.probe_count += 1
            nxt = [v for v in self.adjacent[cur] if v != prev]
            if not nxt:
                return cur
            prev, cur = cur, nxt[0]

    def accept_edge(self, i: int, j: int) -> None:
        """Apply an edge previously judged OK."""
        verdict = self.check_feasible(i, j)
        if verdict is not Verdict.OK:
            raise ValueError(f"accept_edge called on {verdict.value} edge ({i},{j})")
        di, dj = self.degree[i], self.degree[j]
        if di == 0 and dj == 0:
            self.mate[i], self.mate[j] = j, i
        elif di == 1 and dj == 1:
            # Join of two fragments, or the Hamiltonian close at t = n-1.
            a, b = self.mate[i], self.mate[j]
            if a != j:
                self.mate[a], self.mate[b] = b, a
        else:
            if di == 0:
                i, j = j, i  # make i the degree-1 endpoint
            end = self.mate[i]
            self.mate[end], self.mate[j] = j, end
        self.degree[i] += 1
        self.degree[j] += 1
        self.adjacent[i].append(j)
        self.adjacent[j].append(i)
        self.edges.add((i, j) if i < j else (j, i))
        self.t += 1

    def free_vertices(self) -> list:
        return [v for v in range(self.n) if self.degree[v] < 2]

    def is_complete(self) -> bool:
        return self.t == self.n

    def fragment_count(self) -> int:
        return sum(1 for v in range(self.n) if self.degree[v] == 1) // 2

    def tour_order(self) -> list:
        """Vertex order of the completed cycle."""
        if not self.is_complete():
            raise ValueError("solution is not a complete tour")
        order = [0]
        prev, cur = None, 0
        while len(order) < self.n:
            nxt = [v for v in self.adjacent[cur] if v != prev]
            prev, cur = cur, nxt[0]
            order.append(cur)
        return order
