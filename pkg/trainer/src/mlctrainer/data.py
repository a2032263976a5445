"""Training-sample construction on top of the consumer's renderer.

One sample per promising-list entry.  The blue channel replays, in list
order, the optimal edges seen strictly before the entry (the "offline"
third channel used during the cross-entropy phase); labels come from
optimal-tour membership.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from mlconstructive.analysis import generate_dataset, load_optima_table
from mlconstructive.candidates import build_candidate_lists, build_promising_list
from mlconstructive.instance import parse_opt_tour, parse_tsplib
from mlconstructive.render import OfflineEdgeSource, from_blob, render_context, to_blob


@dataclass
class TrainingSample:
    image: np.ndarray  # (96, 96, 3) float32, binary
    label: int  # 1 when the edge belongs to the optimal tour
    position: int  # rank within the owner's candidate list (1 or 2)
    instance: str
    lp_index: int  # index of the entry within the promising list


def samples_for_instance(inst, opt_edges, m: int = 2) -> list[TrainingSample]:
    """Offline-channel samples for every promising-list entry of one instance."""
    cls = build_candidate_lists(inst)
    entries = build_promising_list(cls, m)
    source = OfflineEdgeSource(inst.n, opt_edges)
    samples = []
    for idx, entry in enumerate(entries):
        image = render_context(inst, cls, source.ps, entry.i, entry.j)
        key = (entry.i, entry.j) if entry.i < entry.j else (entry.j, entry.i)
        samples.append(TrainingSample(
            image=image,
            label=int(key in source.optimal_edges),
            position=entry.position,
            instance=inst.name,
            lp_index=idx,
        ))
        source.advance(entry.i, entry.j)
    return samples


def build_dataset(count, n_min, n_max, seed, m: int = 2):
    """Generated instances with exact/reference optima, rendered to samples."""
    ds = generate_dataset(count, n_min, n_max, seed)
    samples = []
    for inst, opt in zip(ds.instances, ds.optima):
        samples.extend(samples_for_instance(inst, opt.edges(), m=m))
    return samples, ds


def load_generated_dir(path):
    """Read a generated-instance directory (instances, tours, optima table)."""
    path = Path(path)
    optima = load_optima_table(path / "optima.jsonl")
    pairs = []
    for tsp in sorted(path.glob("*.tsp")):
        inst = parse_tsplib(tsp.read_text())
        tour = path / f"{inst.name}.tour"
        order = parse_opt_tour(tour.read_text()) if tour.exists() else None
        pairs.append((inst, order, optima.get(inst.name)))
    return pairs


def dataset_from_dir(path, m: int = 2) -> list[TrainingSample]:
    samples = []
    for inst, order, _ in load_generated_dir(path):
        if order is None:
            continue
        edges = {
            (order[t], order[(t + 1) % len(order)]) for t in range(len(order))
        }
        samples.extend(samples_for_instance(inst, edges, m=m))
    return samples


def save_samples(path, samples) -> None:
    """Image blobs plus a JSON-lines index."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    with open(path / "samples.jsonl", "w") as fh:
        for idx, s in enumerate(samples):
            blob = f"{idx:06d}.blob"
            (path / blob).write_bytes(to_blob(s.image))
            fh.write(json.dumps({
                "blob": blob, "label": s.label, "position": s.position,
                "instance": s.instance, "lp_index": s.lp_index,
            }) + "\n")


def load_samples(path) -> list[TrainingSample]:
    path = Path(path)
    samples = []
    with open(path / "samples.jsonl") as fh:
        for line in fh:
            rec = json.loads(line)
            samples.append(TrainingSample(
                image=from_blob((path / rec["blob"]).read_bytes()),
                label=rec["label"],
                position=rec["position"],
                instance=rec["instance"],
                lp_index=rec["lp_index"],
            ))
    return samples


def as_arrays(samples):
    """(images (B,96,96,3) float32, labels (B,) int64) for batching."""
    images = np.stack([s.image for s in samples]).astype(np.float32)
    labels = np.array([s.label for s in samples], dtype=np.int64)
    return images, labels
