"""Two-phase constructive TSP toolkit with a pluggable ML decision taker."""

from .candidates import build_candidate_lists, build_promising_list
from .constructors import clarke_wright, multi_fragment, nearest_neighbor
from .driver import ml_constructive
from .fragments import PartialSolution, Verdict
from .instance import (
    Instance,
    Tour,
    from_coords,
    make_tour,
    parse_opt_tour,
    parse_tsplib,
    percentage_error,
    tour_length,
)

__all__ = [
    "Instance",
    "Tour",
    "PartialSolution",
    "Verdict",
    "build_candidate_lists",
    "build_promising_list",
    "clarke_wright",
    "from_coords",
    "make_tour",
    "ml_constructive",
    "multi_fragment",
    "nearest_neighbor",
    "parse_opt_tour",
    "parse_tsplib",
    "percentage_error",
    "tour_length",
]

__version__ = "0.1.0"
