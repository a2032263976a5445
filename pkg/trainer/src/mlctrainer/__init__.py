"""Training side of the mlconstructive decision-taker CNN."""

from .data import TrainingSample, build_dataset, load_generated_dir
from .model import ResNet10, export_records, load_records_into
from .train import TrainState, TrainingDiverged, train

__all__ = [
    "ResNet10",
    "TrainState",
    "TrainingDiverged",
    "TrainingSample",
    "build_dataset",
    "export_records",
    "load_generated_dir",
    "load_records_into",
    "train",
]

__version__ = "0.1.0"
