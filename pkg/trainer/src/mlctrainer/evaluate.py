"""Held-out classification metrics and a driver-compatible torch policy."""

from __future__ import annotations

import numpy as np
import torch

from mlconstructive.analysis import PositionStats
from mlconstructive.policies import DecisionTaker
from mlconstructive.render import render_context

from .model import ResNet10

EVAL_THRESHOLD = 0.5  # metric-parity decision rule


@torch.no_grad()
def evaluate(model: ResNet10, samples, threshold=EVAL_THRESHOLD,
             batch_size=32) -> dict:
    """Per-position and aggregate TPR/FPR/Acc/PLR at the given threshold."""
    stats = PositionStats()
    tp = fp = pos = neg = 0
    for lo in range(0, len(samples), batch_size):
        chunk = samples[lo : lo + batch_size]
        images = np.stack([s.image for s in chunk])
        probs = torch.softmax(model.logits_hwc(images), dim=1)[:, 0]
        for s, p in zip(chunk, probs.tolist()):
            predicted = p > threshold
            stats.add(s.position, bool(s.label), predicted)
            if s.label:
                pos += 1
                tp += predicted
            else:
                neg += 1
                fp += predicted
    table = {
        f"position_{b}": {
            "tpr": stats.tpr(b), "fpr": stats.fpr(b),
            "acc": stats.accuracy(b), "plr": stats.plr(b),
        }
        for b in sorted(stats.positives)
    }
    tpr = tp / pos if pos else float("nan")
    fpr = fp / neg if neg else float("nan")
    table["aggregate"] = {
        "tpr": tpr, "fpr": fpr,
        "acc": (tp + neg - fp) / (pos + neg) if pos + neg else float("nan"),
        "plr": tpr / fpr if fpr else float("inf"),
    }
    return table


class TorchModelPolicy(DecisionTaker):
    """Decision taker backed by the live torch model (threshold rule)."""

    def __init__(self, model: ResNet10, threshold: float):
        if not 0.0 < threshold < 1.0:
            raise ValueError("threshold must be in (0, 1)")
        self.model = model
        self.threshold = threshold

    @torch.no_grad()
    def decide(self, ctx, entry):
        image = render_context(ctx.inst, ctx.cls, ctx.ps, entry.i, entry.j)
        return self.model.predict_proba(image) > self.threshold
