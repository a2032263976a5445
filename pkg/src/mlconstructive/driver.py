"""Two-phase constructive driver: promising-edge phase plus savings completion."""

from __future__ import annotations

from dataclasses import dataclass, field

from .candidates import build_candidate_lists, build_promising_list
from .constructors import savings_completion
from .fragments import PartialSolution, Verdict
from .instance import Instance, Tour
from .policies import DecisionTaker


@dataclass
class TraceRecord:
    i: int
    j: int
    position: int
    verdict: Verdict
    decision: bool | None  # None when the policy was never queried
    epoch: int


@dataclass
class ConstructionTrace:
    records: list[TraceRecord] = field(default_factory=list)
    phase_boundary: int = 0  # edges accepted during phase 1


@dataclass
class ConstructionContext:
    """Live state handed to the decision taker on every query."""

    inst: Instance
    cls: object
    ps: PartialSolution


def ml_constructive(
    inst: Instance,
    dt: DecisionTaker,
    k: int | None = None,
    m: int = 2,
    use_scan_tracker: bool = False,
) -> tuple[Tour, ConstructionTrace]:
    """Run the full two-phase construction with the given decision taker.

    Phase 1 walks the sorted promising list; the policy is queried only for
    edges that pass the degree and tracker checks.  Phase 2 completes the
    tour over the free vertices by descending savings.
    """
    cls = build_candidate_lists(inst, k)
    if not 1 <= m <= cls.k:
        raise ValueError(f"m={m} out of range for k={cls.k}")
    entries = build_promising_list(cls, m)
    ps = PartialSolution(inst.n, use_scan_tracker=use_scan_tracker)
    ctx = ConstructionContext(inst=inst, cls=cls, ps=ps)
    trace = ConstructionTrace()
    for entry in entries:
        verdict = ps.check_feasible(entry.i, entry.j)
        decision = None
        if verdict is Verdict.OK:
            decision = bool(dt.decide(ctx, entry))
            if decision:
                ps.accept_edge(entry.i, entry.j)
        trace.records.append(
            TraceRecord(entry.i, entry.j, entry.position, verdict, decision, ps.t)
        )
    trace.phase_boundary = ps.t
    # savings_completion is a no-op in the pathological fully-closed case
    tour = savings_completion(inst, ps)
    return tour, trace
