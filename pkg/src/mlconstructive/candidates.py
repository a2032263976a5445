"""Per-vertex candidate lists and the globally sorted promising-edge list."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import Instance

DEFAULT_K = 30


@dataclass(frozen=True)
class CandidateLists:
    """k nearest neighbours of every vertex, sorted by cost then index.

    neighbors[i, p] is the vertex at position p+1 of CL[i]; costs[i, p]
    the matching edge cost.
    """

    neighbors: np.ndarray  # (n, k) int
    costs: np.ndarray      # (n, k)
    k: int
    cost_evaluations: int  # pair-cost evaluations spent building the lists

    @property
    def n(self) -> int:
        return self.neighbors.shape[0]

    def row(self, i):
        """CL[i] as a list of (vertex, cost) pairs."""
        return list(zip(self.neighbors[i].tolist(), self.costs[i].tolist()))

    def position(self, i, j):
        """1-based rank of j in CL[i], or None if j is not listed."""
        hits = np.nonzero(self.neighbors[i] == j)[0]
        return int(hits[0]) + 1 if hits.size else None


@dataclass(frozen=True)
class PromisingEdge:
    i: int
    j: int
    position: int  # rank of j in CL[i], 1-based
    cost: float


def default_k(n: int) -> int:
    """k = 30 unless the instance is too small for it."""
    return min(DEFAULT_K, n - 1)


def build_candidate_lists(inst: Instance, k: int | None = None) -> CandidateLists:
    n = inst.n
    if k is None:
        k = default_k(n)
    if not 1 <= k <= n - 1:
        raise ValueError(f"k={k} out of range for n={n}")
    m = inst.cost_matrix()
    # Ties break on the smaller vertex index; lexsort's last key dominates.
    order = np.lexsort((np.broadcast_to(np.arange(n), (n, n)), m), axis=1)
    # Column 0 is the vertex itself (cost 0); drop it.
    nbrs = order[:, 1 : k + 1]
    costs = np.take_along_axis(m, nbrs, axis=1)
    return CandidateLists(
        neighbors=nbrs,
        costs=costs,
        k=k,
        cost_evaluations=n * (n - 1),
    )


def build_promising_list(cls: CandidateLists, m: int = 2) -> list[PromisingEdge]:
    """The phase-1 work queue L_P.

    Takes the first m entries of every CL, deduplicates on the unordered
    vertex pair keeping the smallest position, then sorts by (position,
    cost, i, j).  Holds at most m*n entries.
    """
    if not 1 <= m <= cls.k:
        raise ValueError(f"m={m} must be in 1..k={cls.k}")
    best: dict[tuple, PromisingEdge] = {}
    for i in range(cls.n):
        for p in range(m):
            j = int(cls.neighbors[i, p])
            key = (i, j) if i < j else (j, i)
            entry = PromisingEdge(i=i, j=j, position=p + 1, cost=cls.costs[i, p])
            prev = best.get(key)
            if prev is None or entry.position < prev.position:
                best[key] = entry
    entries = sorted(best.values(), key=lambda e: (e.position, e.cost, e.i, e.j))
    return entries


def promising_list_csv(entries) -> str:
    lines = ["i,j,position,cost"]
    lines.extend(f"{e.i},{e.j},{e.position},{e.cost}" for e in entries)
    return "\n".join(lines) + "\n"
