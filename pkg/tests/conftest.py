import json
from pathlib import Path

import pytest

import mlconstructive as mc

HERE = Path(__file__).parent


@pytest.fixture
def triangle():
    """3-4-5 right triangle; the unique tour has length 12."""
    return mc.from_coords([(0, 0), (0, 3), (4, 0)], name="triangle")


@pytest.fixture(scope="session")
def reference_gaps():
    with open(HERE / "data" / "reference_gaps.json") as fh:
        return json.load(fh)
