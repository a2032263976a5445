"""Residual CNN forward pass over context images, self-contained in numpy.

Architecture: a 3x3 stride-1 stem, four residual blocks whose first
convolution halves the resolution and doubles the feature count, global
average pooling into 1024 features, a 9-unit fully connected layer and a
2-unit softmax head.  No normalization layers; every convolution carries a
bias.  The stem width is 64 so the four doublings reach 1024 at the pool.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import weights as wio

STEM_WIDTH = 64
BLOCKS = 4
KERNEL = 3
FC_UNITS = 9
OUT_UNITS = 2
POOLED_FEATURES = STEM_WIDTH * 2 ** BLOCKS  # 1024
IMAGE_SIZE = 96

ARCH_RECORD = "arch"
ARCH_VALUES = (BLOCKS, KERNEL, STEM_WIDTH, FC_UNITS, OUT_UNITS)


def block_widths():
    """(in, out) channel pairs of the four residual blocks."""
    widths = [STEM_WIDTH * 2 ** b for b in range(BLOCKS + 1)]
    return list(zip(widths[:-1], widths[1:]))


def parameter_shapes() -> dict[str, tuple]:
    shapes = {
        "stem.w": (STEM_WIDTH, 3, KERNEL, KERNEL),
        "stem.b": (STEM_WIDTH,),
    }
    for b, (cin, cout) in enumerate(block_widths(), start=1):
        shapes[f"block{b}.conv1.w"] = (cout, cin, KERNEL, KERNEL)
        shapes[f"block{b}.conv1.b"] = (cout,)
        shapes[f"block{b}.conv2.w"] = (cout, cout, KERNEL, KERNEL)
        shapes[f"block{b}.conv2.b"] = (cout,)
        shapes[f"block{b}.proj.w"] = (cout, cin, 1, 1)
        shapes[f"block{b}.proj.b"] = (cout,)
    shapes["fc1.w"] = (FC_UNITS, POOLED_FEATURES)
    shapes["fc1.b"] = (FC_UNITS,)
    shapes["fc2.w"] = (OUT_UNITS, FC_UNITS)
    shapes["fc2.b"] = (OUT_UNITS,)
    return shapes


def validate_records(records) -> None:
    arch = records.get(ARCH_RECORD)
    if arch is None:
        raise wio.ShapeError("missing architecture descriptor record")
    if tuple(int(v) for v in np.asarray(arch).ravel()) != ARCH_VALUES:
        raise wio.ShapeError(
            f"architecture descriptor {np.asarray(arch).ravel()} != {ARCH_VALUES}"
        )
    for name, shape in parameter_shapes().items():
        arr = records.get(name)
        if arr is None:
            raise wio.ShapeError(f"missing parameter {name}")
        if tuple(arr.shape) != shape:
            raise wio.ShapeError(
                f"parameter {name} has shape {tuple(arr.shape)}, expected {shape}"
            )


def random_records(seed=0) -> dict[str, np.ndarray]:
    """He-initialized parameter set; lets inference run without a trainer."""
    rng = np.random.default_rng(seed)
    records = {ARCH_RECORD: np.array(ARCH_VALUES, dtype=np.float32)}
    for name, shape in parameter_shapes().items():
        if name.endswith(".b"):
            records[name] = np.zeros(shape, dtype=np.float32)
        else:
            fan_in = int(np.prod(shape[1:]))
            records[name] = rng.normal(
                0.0, np.sqrt(2.0 / fan_in), size=shape
            ).astype(np.float32)
    return records


def load_weights(data: bytes) -> dict[str, np.ndarray]:
    """Parse weight bytes and enforce shape consistency."""
    records = wio.load_bundle(data)
    validate_records(records)
    return records


def conv2d(x, w, b, stride=1, pad=1):
    """Batched-window convolution (im2col style) on a (C, H, W) input."""
    if pad:
        x = np.pad(x, ((0, 0), (pad, pad), (pad, pad)))
    kh, kw = w.shape[2], w.shape[3]
    win = sliding_window_view(x, (kh, kw), axis=(1, 2))[:, ::stride, ::stride]
    out = np.tensordot(w, win, axes=([1, 2, 3], [0, 3, 4]))
    return out + b[:, None, None]


def relu(x):
    return np.maximum(x, 0.0)


def softmax(z):
    z = z - np.max(z)
    e = np.exp(z)
    return e / e.sum()


@dataclass(frozen=True)
class Prediction:
    p_optimal: float
    p_not_optimal: float


class ResNetClassifier:
    """Immutable forward-only classifier over validated weight records."""

    def __init__(self, records):
        validate_records(records)
        self.records = {
            k: np.asarray(v, dtype=np.float32) for k, v in records.items()
        }

    def logits(self, img: np.ndarray) -> np.ndarray:
        if img.shape != (IMAGE_SIZE, IMAGE_SIZE, 3):
            raise ValueError(f"image must be {IMAGE_SIZE}x{IMAGE_SIZE}x3")
        r = self.records
        x = np.ascontiguousarray(img.transpose(2, 0, 1), dtype=np.float32)
        x = relu(conv2d(x, r["stem.w"], r["stem.b"]))
        for b in range(1, BLOCKS + 1):
            y = relu(conv2d(x, r[f"block{b}.conv1.w"], r[f"block{b}.conv1.b"], stride=2))
            y = conv2d(y, r[f"block{b}.conv2.w"], r[f"block{b}.conv2.b"])
            shortcut = conv2d(x, r[f"block{b}.proj.w"], r[f"block{b}.proj.b"],
                              stride=2, pad=0)
            x = relu(y + shortcut)
        pooled = x.mean(axis=(1, 2))
        hidden = relu(r["fc1.w"] @ pooled + r["fc1.b"])
        return r["fc2.w"] @ hidden + r["fc2.b"]

    def predict(self, img) -> tuple[float, float]:
        p = softmax(self.logits(img).astype(np.float64))
        return float(p[0]), float(p[1])

    def prediction(self, img) -> Prediction:
        p_opt, p_not = self.predict(img)
        return Prediction(p_optimal=p_opt, p_not_optimal=p_not)

    def decide(self, img, threshold) -> bool:
        """Accept iff the optimal probability strictly exceeds the threshold."""
        if not 0.0 < threshold < 1.0:
            raise ValueError("threshold must be in (0, 1)")
        p_opt, _ = self.predict(img)
        return p_opt > threshold
