"""Decision-taker policies queried for each feasible promising edge."""

from __future__ import annotations

import numpy as np

EMPIRICAL_P1 = 0.886
EMPIRICAL_P2 = 0.512
DEFAULT_THRESHOLD = 0.99


class DecisionTaker:
    """Accept/reject policy for phase-1 edges.

    decide() is total; subclasses may use the construction context (live
    partial solution, candidate lists) but most only look at the position.
    """

    def decide(self, ctx, entry) -> bool:
        raise NotImplementedError


class FirstPolicy(DecisionTaker):
    """Accept iff one extreme is the other's first closest (position 1)."""

    def decide(self, ctx, entry):
        return entry.position == 1


class SecondPolicy(DecisionTaker):
    def decide(self, ctx, entry):
        return entry.position == 2


class AlwaysPolicy(DecisionTaker):
    def decide(self, ctx, entry):
        return True


class NeverPolicy(DecisionTaker):
    """Rejects everything; leaves all construction to phase two (pure CW)."""

    def decide(self, ctx, entry):
        return False


class EmpiricalPolicy(DecisionTaker):
    """Bernoulli acceptance with the observed per-position optimal rates."""

    def __init__(self, seed, p1=EMPIRICAL_P1, p2=EMPIRICAL_P2):
        self.rng = np.random.default_rng(seed)
        self.p1 = p1
        self.p2 = p2

    def decide(self, ctx, entry):
        p = self.p1 if entry.position == 1 else self.p2
        return bool(self.rng.random() < p)


class OraclePolicy(DecisionTaker):
    """Answers from a known optimal tour (the super-confident upper bound)."""

    def __init__(self, optimal_edges):
        self.optimal_edges = {
            (i, j) if i < j else (j, i) for i, j in optimal_edges
        }

    def decide(self, ctx, entry):
        key = (entry.i, entry.j) if entry.i < entry.j else (entry.j, entry.i)
        return key in self.optimal_edges


class ModelPolicy(DecisionTaker):
    """CNN decision-taker: accept iff predicted optimal probability > threshold."""

    def __init__(self, bundle, threshold=DEFAULT_THRESHOLD):
        from .network import ResNetClassifier

        if not 0.0 < threshold < 1.0:
            raise ValueError("threshold must be in (0, 1)")
        self.model = ResNetClassifier(bundle)
        self.threshold = threshold

    def decide(self, ctx, entry):
        from .render import render_context

        img = render_context(ctx.inst, ctx.cls, ctx.ps, entry.i, entry.j)
        p_opt, _ = self.model.predict(img)
        return p_opt > self.threshold


POLICY_NAMES = ("mf", "cw", "nn", "f", "s", "y", "ae", "be", "ml-c", "ml-sc")
