"""Torch twin of the inference-side residual classifier.

The layer layout mirrors the consumer's weight records exactly: a 3x3
stride-1 stem at width 64, four residual blocks whose first convolution
halves the resolution and doubles the channels (1x1 projection shortcut),
global average pooling to 1024 features, a 9-unit hidden layer and a 2-way
head.  Every convolution carries a bias; there are no normalization
layers.  Logit 0 is the "edge is optimal" class.
"""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

from mlconstructive import network


class ResidualBlock(nn.Module):
    def __init__(self, cin: int, cout: int):
        super().__init__()
        self.conv1 = nn.Conv2d(cin, cout, 3, stride=2, padding=1)
        self.conv2 = nn.Conv2d(cout, cout, 3, padding=1)
        self.proj = nn.Conv2d(cin, cout, 1, stride=2)

    def forward(self, x):
        y = self.conv2(torch.relu(self.conv1(x)))
        return torch.relu(y + self.proj(x))


class ResNet10(nn.Module):
    def __init__(self):
        super().__init__()
        self.stem = nn.Conv2d(3, network.STEM_WIDTH, 3, padding=1)
        self.blocks = nn.ModuleList(
            [ResidualBlock(cin, cout) for cin, cout in network.block_widths()]
        )
        self.fc1 = nn.Linear(network.POOLED_FEATURES, network.FC_UNITS)
        self.fc2 = nn.Linear(network.FC_UNITS, network.OUT_UNITS)
        self.reset_parameters()

    def reset_parameters(self):
        # He-normal fan-in scaling: torch's default conv init attenuates
        # activations by ~6x per block here, which flattens the pooled
        # features (and their gradients) to noise on sparse binary inputs
        for mod in self.modules():
            if isinstance(mod, (nn.Conv2d, nn.Linear)):
                nn.init.kaiming_normal_(mod.weight, nonlinearity="relu")
                nn.init.zeros_(mod.bias)

    def forward(self, x):
        x = torch.relu(self.stem(x))
        for block in self.blocks:
            x = block(x)
        x = x.mean(dim=(2, 3))
        return self.fc2(torch.relu(self.fc1(x)))

    def logits_hwc(self, images: np.ndarray) -> torch.Tensor:
        """Forward a (B, 96, 96, 3) float array as used by the renderer."""
        dtype = next(self.parameters()).dtype
        x = torch.from_numpy(
            np.ascontiguousarray(images.transpose(0, 3, 1, 2))
        ).to(dtype)
        return self(x)

    @torch.no_grad()
    def predict_proba(self, image: np.ndarray) -> float:
        """P(edge optimal) for one (96, 96, 3) image."""
        logits = self.logits_hwc(image[None])
        return float(torch.softmax(logits[0], dim=0)[0])


# torch parameter path -> consumer record name
_RECORD_MAP = {"stem": "stem", "fc1": "fc1", "fc2": "fc2"}


def _record_name(param_name: str) -> str:
    parts = param_name.split(".")
    kind = "w" if parts[-1] == "weight" else "b"
    if parts[0] == "blocks":
        return f"block{int(parts[1]) + 1}.{parts[2]}.{kind}"
    return f"{_RECORD_MAP[parts[0]]}.{kind}"


def export_records(model: ResNet10) -> dict[str, np.ndarray]:
    """Weight records in the consumer's layout (validated against it)."""
    records = {
        network.ARCH_RECORD: np.array(network.ARCH_VALUES, dtype=np.float32)
    }
    for name, param in model.named_parameters():
        records[_record_name(name)] = (
            param.detach().cpu().numpy().astype(np.float32)
        )
    network.validate_records(records)
    return records


def load_records_into(model: ResNet10, records) -> None:
    network.validate_records(records)
    with torch.no_grad():
        for name, param in model.named_parameters():
            param.copy_(torch.from_numpy(
                np.asarray(records[_record_name(name)], dtype=np.float32)
            ))
