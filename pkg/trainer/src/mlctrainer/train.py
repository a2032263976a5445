"""Two-phase optimization: cross-entropy warm-up, then joint CE + REINFORCE.

Phase A minimizes the cross-entropy of optimal-tour membership.  On a
single CPU the 19M-parameter network cannot escape the class prior with
plain end-to-end minibatch descent in any reasonable time, so the phase
runs as a classifier-head fit over cached trunk features: pooled
activations of the (He-initialized, frozen) convolutional trunk are
computed once for the training images and their three axis flips, the
9-unit head is trained full-batch with dropout and weight decay, the best
validation snapshots are averaged, and the feature standardization is
folded back into the first linear layer so the exported network consumes
raw images unchanged.

Phase B alternates one gentle end-to-end CE step with one policy-gradient
step on rollouts whose blue channel shows the model's *own* accepted
edges; decisions are sampled from the predicted probability, the reward
is +1 for a correct call and -1 otherwise, and a simple moving average
over the last 100 rewards serves as the baseline.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from torch import nn

from mlconstructive import weights as wio
from mlconstructive.candidates import build_candidate_lists, build_promising_list
from mlconstructive.fragments import PartialSolution, Verdict
from mlconstructive.render import render_context

from .data import as_arrays
from .model import ResNet10, export_records

BASELINE_PERIODS = 100
META_RECORD = "meta"

HEAD_LR = 3e-4
HEAD_WEIGHT_DECAY = 1e-2
HEAD_DROPOUT = 0.5
HEAD_SNAPSHOT_EVERY = 10
HEAD_SNAPSHOT_TOPK = 5
VAL_FRACTION = 0.15
PHASE_B_LR = 1e-4
PHASE_B_CLIP = 1.0


class TrainingDiverged(RuntimeError):
    """Raised when a loss goes non-finite; carries the diagnostics string."""


@dataclass
class TrainState:
    model: ResNet10
    ce_iters_done: int = 0
    rl_iters_done: int = 0
    baseline: deque = field(
        default_factory=lambda: deque(maxlen=BASELINE_PERIODS)
    )
    loss1_history: list = field(default_factory=list)
    loss2_history: list = field(default_factory=list)
    reward_stream: list = field(default_factory=list)
    baseline_stream: list = field(default_factory=list)

    def baseline_value(self) -> float:
        return float(np.mean(self.baseline)) if self.baseline else 0.0


def ce_loss(model: ResNet10, images: np.ndarray, labels: np.ndarray):
    """Cross entropy with logit 0 as the positive (optimal) class."""
    logits = model.logits_hwc(images)
    targets = torch.from_numpy(1 - labels)  # class 0 <=> label 1
    return nn.functional.cross_entropy(logits, targets)


def _check_finite(loss, state, which, iteration):
    if torch.isfinite(loss):
        return
    raise TrainingDiverged(
        f"{which} became non-finite at iteration {iteration} "
        f"(ce_done={state.ce_iters_done}, rl_done={state.rl_iters_done}, "
        f"last loss1={state.loss1_history[-1] if state.loss1_history else None})"
    )


def pooled_features(model: ResNet10, images: np.ndarray,
                    batch_size: int = 16) -> torch.Tensor:
    """Cached trunk output: global-average-pooled activations per image."""
    outs = []
    with torch.inference_mode():
        for lo in range(0, len(images), batch_size):
            chunk = images[lo : lo + batch_size].transpose(0, 3, 1, 2)
            x = torch.from_numpy(np.ascontiguousarray(chunk))
            x = torch.relu(model.stem(x))
            for block in model.blocks:
                x = block(x)
            outs.append(x.mean(dim=(2, 3)))
    return torch.cat(outs)


def _head_warmup(model, state, images, labels, ce_iters, batch_size):
    """Phase A: fit the fc head on cached (augmented) trunk features."""
    n_val = max(1, int(VAL_FRACTION * len(labels)))
    val_img, tr_img = images[:n_val], images[n_val:]
    val_y = torch.from_numpy(1 - labels[:n_val])
    tr_y = torch.from_numpy(1 - labels[n_val:])

    feats = [pooled_features(model, tr_img, batch_size)]
    # axis flips of the rendered geometry keep the label semantics
    for aug in (tr_img[:, :, ::-1], tr_img[:, ::-1, :], tr_img[:, ::-1, ::-1]):
        feats.append(pooled_features(model, np.ascontiguousarray(aug),
                                     batch_size))
    f_val = pooled_features(model, val_img, batch_size)

    mu = feats[0].mean(0)
    sd = feats[0].std(0).clamp_min(1e-6)
    train_x = torch.cat([(f - mu) / sd for f in feats])
    train_y = torch.cat([tr_y] * len(feats))
    val_x = (f_val - mu) / sd

    fc1 = nn.Linear(*reversed(model.fc1.weight.shape))
    fc2 = nn.Linear(*reversed(model.fc2.weight.shape))
    drop = nn.Dropout(HEAD_DROPOUT)
    opt = torch.optim.Adam(
        list(fc1.parameters()) + list(fc2.parameters()),
        lr=HEAD_LR, weight_decay=HEAD_WEIGHT_DECAY,
    )
    snapshots = []

    def snapshot():
        with torch.no_grad():
            val_loss = float(nn.functional.cross_entropy(
                fc2(torch.relu(fc1(val_x))), val_y))
        snapshots.append((val_loss, [
            t.detach().clone()
            for t in (fc1.weight, fc1.bias, fc2.weight, fc2.bias)
        ]))

    for it in range(ce_iters):
        opt.zero_grad()
        loss = nn.functional.cross_entropy(
            fc2(torch.relu(fc1(drop(train_x)))), train_y)
        _check_finite(loss, state, "loss1", it)
        loss.backward()
        opt.step()
        state.loss1_history.append(float(loss.detach()))
        state.ce_iters_done += 1
        if it % HEAD_SNAPSHOT_EVERY == HEAD_SNAPSHOT_EVERY - 1:
            snapshot()
    if not snapshots:
        snapshot()
    snapshots.sort(key=lambda s: s[0])
    top = snapshots[:HEAD_SNAPSHOT_TOPK]
    w1, b1, w2, b2 = (
        torch.stack([s[1][i] for s in top]).mean(0) for i in range(4)
    )
    # fold the feature standardization into fc1 so inference sees raw images
    with torch.no_grad():
        model.fc1.weight.copy_(w1 / sd)
        model.fc1.bias.copy_(b1 - (w1 * (mu / sd)).sum(dim=1))
        model.fc2.weight.copy_(w2)
        model.fc2.bias.copy_(b2)


def _ce_step(model, optimizer, state, images, labels, rng, batch_size, it):
    idx = rng.choice(len(labels), size=min(batch_size, len(labels)),
                     replace=False)
    optimizer.zero_grad()
    loss = ce_loss(model, images[idx], labels[idx])
    _check_finite(loss, state, "loss1", it)
    loss.backward()
    nn.utils.clip_grad_norm_(model.parameters(), PHASE_B_CLIP)
    optimizer.step()
    state.loss1_history.append(float(loss.detach()))


def rollout_decisions(model, inst, opt_edges, rng, m=2):
    """Sampled online replay of the promising list.

    Returns (log_probs, rewards) for every feasible entry: the decision is
    drawn from the predicted probability, the partial solution grows with
    the model's own accepted edges, and the reward is +1 when the sampled
    call matches optimal-tour membership.
    """
    cls = build_candidate_lists(inst)
    entries = build_promising_list(cls, m)
    opt = {(a, b) if a < b else (b, a) for a, b in opt_edges}
    ps = PartialSolution(inst.n)
    log_probs, rewards = [], []
    for entry in entries:
        if ps.check_feasible(entry.i, entry.j) is not Verdict.OK:
            continue
        image = render_context(inst, cls, ps, entry.i, entry.j)
        logits = model.logits_hwc(image[None])[0]
        p_opt = torch.softmax(logits, dim=0)[0]
        accept = bool(rng.random() < float(p_opt.detach()))
        if accept:
            ps.accept_edge(entry.i, entry.j)
        key = (entry.i, entry.j) if entry.i < entry.j else (entry.j, entry.i)
        correct = accept == (key in opt)
        rewards.append(1.0 if correct else -1.0)
        prob = p_opt if accept else 1.0 - p_opt
        log_probs.append(torch.log(prob.clamp_min(1e-8)))
    return log_probs, rewards


def _reinforce_step(model, optimizer, state, rollouts, rng, it):
    inst, opt_edges = rollouts[rng.integers(len(rollouts))]
    log_probs, rewards = rollout_decisions(model, inst, opt_edges, rng)
    if not log_probs:
        return
    terms = []
    for logp, reward in zip(log_probs, rewards):
        b = state.baseline_value()
        state.baseline_stream.append(b)
        state.reward_stream.append(reward)
        state.baseline.append(reward)
        terms.append(-(reward - b) * logp)
    loss = torch.stack(terms).mean()
    _check_finite(loss, state, "loss2", it)
    optimizer.zero_grad()
    loss.backward()
    nn.utils.clip_grad_norm_(model.parameters(), PHASE_B_CLIP)
    optimizer.step()
    state.loss2_history.append(float(loss.detach()))


def train(samples, *, rollouts=None, ce_iters=3000, rl_iters=30,
          batch_size=16, lr=PHASE_B_LR, seed=0, model=None,
          out_path=None, log_path=None) -> TrainState:
    """Run phase A then phase B; optionally export weights and a JSON log."""
    if rl_iters > 0 and not rollouts:
        raise ValueError("phase B needs rollout instances")
    torch.manual_seed(seed)
    rng = np.random.default_rng(seed)
    if model is None:
        model = ResNet10()
    state = TrainState(model=model)
    images, labels = as_arrays(samples)

    _head_warmup(model, state, images, labels, ce_iters, batch_size)

    # gentle momentum steps: the warmed-up head is sensitive and fresh
    # adaptive-optimizer state would wipe it out within a few iterations
    optimizer = torch.optim.SGD(model.parameters(), lr=lr, momentum=0.9)
    for it in range(rl_iters):
        _ce_step(model, optimizer, state, images, labels, rng, batch_size,
                 ce_iters + it)
        state.ce_iters_done += 1
        _reinforce_step(model, optimizer, state, rollouts, rng, ce_iters + it)
        state.rl_iters_done += 1

    if out_path is not None:
        export(model, out_path, meta=(lr, ce_iters, rl_iters, batch_size, seed))
    if log_path is not None:
        Path(log_path).write_text(json.dumps({
            "loss1": state.loss1_history,
            "loss2": state.loss2_history,
            "rewards": state.reward_stream,
            "baseline": state.baseline_stream,
        }))
    return state


def export(model: ResNet10, path, meta=None) -> None:
    """Write the model as a consumer-format weight file."""
    records = export_records(model)
    if meta is not None:
        records[META_RECORD] = np.asarray(meta, dtype=np.float32)
    wio.save_bundle_file(path, records)


def moving_average_baseline(rewards, periods=BASELINE_PERIODS):
    """Reference recomputation of the logged baseline stream."""
    out = []
    window = deque(maxlen=periods)
    for r in rewards:
        out.append(float(np.mean(window)) if window else 0.0)
        window.append(r)
    return out
