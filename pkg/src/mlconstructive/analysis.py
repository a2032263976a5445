"""Instance generation, exact small-n solving and the statistics harness."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .candidates import build_candidate_lists
from .constructors import nearest_neighbor
from .fragments import PartialSolution, Verdict
from .instance import Instance, Tour, from_coords, make_tour, percentage_error

HELD_KARP_MAX_N = 18
POSITION_BUCKETS = (1, 2, 3, 4, 5)  # everything above goes in the ">5" bucket


def generate_instances(count, n_min, n_max, seed) -> list[Instance]:
    """Uniform unit-square instances with real euclidean costs."""
    if not 3 <= n_min <= n_max:
        raise ValueError("need 3 <= n_min <= n_max")
    rng = np.random.default_rng(seed)
    out = []
    for idx in range(count):
        n = int(rng.integers(n_min, n_max + 1))
        coords = rng.random((n, 2))
        out.append(
            from_coords(coords, edge_weight_type="EUC_2D_REAL",
                        name=f"rand-{seed}-{idx}")
        )
    return out


def held_karp(inst: Instance) -> Tour:
    """Exact optimum by bitmask dynamic programming; memory is O(2^n * n)."""
    n = inst.n
    if n > HELD_KARP_MAX_N:
        raise ValueError(f"held_karp is limited to n <= {HELD_KARP_MAX_N}")
    m = np.asarray(inst.cost_matrix(), dtype=np.float64)
    full = 1 << (n - 1)  # subsets of {1..n-1}; vertex 0 is the anchor
    dp = np.full((full, n - 1), np.inf)
    parent = np.full((full, n - 1), -1, dtype=np.int16)
    for v in range(1, n):
        dp[1 << (v - 1), v - 1] = m[0, v]
    for mask in range(1, full):
        row = dp[mask]
        active = np.nonzero(np.isfinite(row))[0]
        if active.size == 0:
            continue
        for last in active:
            base = row[last]
            rest = (~mask) & (full - 1)
            sub = rest
            while sub:
                low = sub & -sub
                v = low.bit_length() - 1
                cand = base + m[last + 1, v + 1]
                nmask = mask | low
                if cand < dp[nmask, v]:
                    dp[nmask, v] = cand
                    parent[nmask, v] = last
                sub ^= low
    closing = dp[full - 1] + m[1:, 0]
    last = int(np.argmin(closing))
    order = [0]
    mask = full - 1
    chain = []
    while last >= 0:
        chain.append(last + 1)
        nxt = int(parent[mask, last])
        mask ^= 1 << last
        last = nxt
    order.extend(reversed(chain))
    return make_tour(inst, order)


def two_opt(inst: Instance, order) -> list:
    """First-improvement 2-opt descent to a local optimum."""
    m = np.asarray(inst.cost_matrix(), dtype=np.float64)
    order = list(order)
    n = len(order)
    improved = True
    while improved:
        improved = False
        for a in range(n - 1):
            i, i2 = order[a], order[a + 1]
            for b in range(a + 2, n):
                j, j2 = order[b], order[(b + 1) % n]
                if j2 == i:
                    continue
                delta = m[i, j] + m[i2, j2] - m[i, i2] - m[j, j2]
                if delta < -1e-12:
                    order[a + 1 : b + 1] = reversed(order[a + 1 : b + 1])
                    improved = True
                    i2 = order[a + 1]
    return order


def reference_optimum(inst: Instance, starts: int = 10) -> Tour:
    """Exact for small n, otherwise the best of several 2-opt descents.

    The multi-start tours are reference solutions, not certified optima.
    """
    if inst.n <= HELD_KARP_MAX_N:
        return held_karp(inst)
    best = None
    for s in range(min(starts, inst.n)):
        start = (s * inst.n) // starts
        order = two_opt(inst, nearest_neighbor(inst, start).order)
        tour = make_tour(inst, order)
        if best is None or tour.length < best.length:
            best = tour
    return best


@dataclass
class GeneratedDataset:
    instances: list
    optima: list  # Tour per instance (exact or reference)
    seed: int


def generate_dataset(count, n_min, n_max, seed, exact=None) -> GeneratedDataset:
    """Instances paired with exact (n <= 18) or 2-opt reference optima."""
    instances = generate_instances(count, n_min, n_max, seed)
    if exact is None:
        exact = n_max <= HELD_KARP_MAX_N
    optima = []
    for inst in instances:
        optima.append(held_karp(inst) if exact else reference_optimum(inst))
    return GeneratedDataset(instances=instances, optima=optima, seed=seed)


def _bucket(position: int) -> int:
    """Collapse positions above 5 into one overflow bucket (key 6)."""
    return position if position <= POSITION_BUCKETS[-1] else POSITION_BUCKETS[-1] + 1


@dataclass
class PositionStats:
    """Per-position confusion counts with the derived rate identities."""

    positives: dict = field(default_factory=dict)
    negatives: dict = field(default_factory=dict)
    true_positives: dict = field(default_factory=dict)
    false_positives: dict = field(default_factory=dict)

    def add(self, position, is_optimal, predicted):
        b = _bucket(position)
        for d in (self.positives, self.negatives,
                  self.true_positives, self.false_positives):
            d.setdefault(b, 0)
        if is_optimal:
            self.positives[b] += 1
            if predicted:
                self.true_positives[b] += 1
        else:
            self.negatives[b] += 1
            if predicted:
                self.false_positives[b] += 1

    def tpr(self, bucket):
        p = self.positives.get(bucket, 0)
        return self.true_positives.get(bucket, 0) / p if p else float("nan")

    def fpr(self, bucket):
        n = self.negatives.get(bucket, 0)
        return self.false_positives.get(bucket, 0) / n if n else float("nan")

    def plr(self, bucket):
        fpr = self.fpr(bucket)
        return self.tpr(bucket) / fpr if fpr else float("inf")

    def accuracy(self, bucket):
        p = self.positives.get(bucket, 0)
        n = self.negatives.get(bucket, 0)
        tp = self.true_positives.get(bucket, 0)
        tn = n - self.false_positives.get(bucket, 0)
        return (tp + tn) / (p + n) if (p + n) else float("nan")


def optimal_position_pdf(dataset: GeneratedDataset, k=None):
    """Where in the candidate lists the optimal edges sit.

    Returns (pdf, rate): pdf[bucket] is the share of optimal-edge
    occurrences at that position (sums to 1); rate[bucket] the frequency
    that a position-p candidate edge is optimal.
    """
    occurrences: dict[int, int] = {}
    totals: dict[int, int] = {}
    for inst, opt in zip(dataset.instances, dataset.optima):
        cls = build_candidate_lists(inst, k)
        opt_edges = opt.edges() if isinstance(opt, Tour) else set(opt)
        for i in range(inst.n):
            for p in range(cls.k):
                j = int(cls.neighbors[i, p])
                b = _bucket(p + 1)
                totals[b] = totals.get(b, 0) + 1
                key = (i, j) if i < j else (j, i)
                if key in opt_edges:
                    occurrences[b] = occurrences.get(b, 0) + 1
    total_opt = sum(occurrences.values())
    pdf = {b: occurrences.get(b, 0) / total_opt for b in totals}
    rate = {b: occurrences.get(b, 0) / totals[b] for b in totals}
    return pdf, rate


def position_metrics(runs, k=None) -> PositionStats:
    """Final-tour membership vs optimality per candidate-list position.

    runs: iterable of (instance, final tour, optimal tour).
    """
    stats = PositionStats()
    for inst, tour, opt in runs:
        cls = build_candidate_lists(inst, k)
        tour_edges = tour.edges()
        opt_edges = opt.edges()
        for i in range(inst.n):
            for p in range(cls.k):
                j = int(cls.neighbors[i, p])
                key = (i, j) if i < j else (j, i)
                stats.add(p + 1, key in opt_edges, key in tour_edges)
    return stats


def insertion_probability_trend(inst: Instance, trials, seed, deciles=10):
    """Monte-Carlo acceptance frequency by list-position decile.

    Shuffles all edges and feeds them to a constraint-only constructor;
    estimates how often the edge at each decile of the shuffled list gets
    accepted.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    n = inst.n
    iu, ju = np.triu_indices(n, k=1)
    e = len(iu)
    rng = np.random.default_rng(seed)
    accepted = np.zeros(deciles)
    counts = np.zeros(deciles)
    edges = np.stack([iu, ju], axis=1)
    for _ in range(trials):
        perm = rng.permutation(e)
        ps = PartialSolution(n)
        for pos, idx in enumerate(perm):
            d = min(pos * deciles // e, deciles - 1)
            counts[d] += 1
            i, j = int(edges[idx, 0]), int(edges[idx, 1])
            if ps.check_feasible(i, j) is Verdict.OK:
                ps.accept_edge(i, j)
                accepted[d] += 1
    return (accepted / counts).tolist()


def load_optima_table(path) -> dict[str, int]:
    """JSON-lines {name, optimum} table."""
    table = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            table[rec["name"]] = rec["optimum"]
    return table


@dataclass
class BenchmarkRow:
    instance: str
    policy: str
    length: float
    gap: float
    seconds: float


def run_benchmark(instances, policies, optima) -> list[BenchmarkRow]:
    """Gap matrix over (instance, policy) pairs.

    policies: mapping name -> callable(instance) -> Tour.  Instances
    without a reference optimum are skipped.
    """
    rows = []
    for inst in instances:
        opt = optima.get(inst.name)
        if opt is None:
            continue
        for name, solve in policies.items():
            t0 = time.perf_counter()
            tour = solve(inst)
            dt = time.perf_counter() - t0
            rows.append(BenchmarkRow(
                instance=inst.name,
                policy=name,
                length=tour.length,
                gap=percentage_error(tour.length, opt),
                seconds=dt,
            ))
    return rows


def benchmark_summary(rows):
    """Per-policy mean/std gaps and best counts."""
    by_policy: dict[str, list] = {}
    by_instance: dict[str, list] = {}
    for r in rows:
        by_policy.setdefault(r.policy, []).append(r.gap)
        by_instance.setdefault(r.instance, []).append(r)
    best_counts = {p: 0 for p in by_policy}
    for recs in by_instance.values():
        best = min(r.gap for r in recs)
        for r in recs:
            if r.gap == best:
                best_counts[r.policy] += 1
    return {
        p: {
            "mean": float(np.mean(g)),
            "std": float(np.std(g)),
            "best": best_counts[p],
        }
        for p, g in by_policy.items()
    }


def benchmark_csv(rows) -> str:
    policies = sorted({r.policy for r in rows})
    by_instance: dict[str, dict] = {}
    for r in rows:
        by_instance.setdefault(r.instance, {})[r.policy] = r.gap
    lines = ["instance," + ",".join(policies)]
    for name, gaps in by_instance.items():
        lines.append(
            name + "," + ",".join(
                f"{gaps[p]:.3f}" if p in gaps else "" for p in policies
            )
        )
    return "\n".join(lines) + "\n"
