import numpy as np
import pytest
import torch

from mlctrainer.data import build_dataset


@pytest.fixture(scope="session")
def small_dataset():
    """Tiny rendered dataset shared across trainer tests."""
    samples, ds = build_dataset(6, 10, 12, seed=600)
    return samples, ds


@pytest.fixture(autouse=True)
def _deterministic_torch():
    torch.manual_seed(0)
    np.random.seed(0)
