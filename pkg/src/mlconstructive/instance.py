"""TSP instance representation, TSPLIB parsing and distance functions.

Distances follow the TSPLIB reference conventions: EUC_2D rounds to the
nearest integer, GEO uses great-circle distances on a sphere of radius
6378.388 with degree.minute coordinate decoding, and ATT is the
pseudo-euclidean distance.  A non-standard EUC_2D_REAL mode keeps exact
euclidean costs and is used only for generated unit-square instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

GEO_RADIUS = 6378.388

SUPPORTED_EDGE_WEIGHT_TYPES = ("EUC_2D", "GEO", "ATT", "EXPLICIT", "EUC_2D_REAL")


class TsplibError(ValueError):
    """Raised for malformed or unsupported TSPLIB input."""


def nint(x):
    """TSPLIB nearest-integer rounding."""
    return int(x + 0.5)


def _geo_radians(coord: float) -> float:
    deg = int(coord)
    minutes = coord - deg
    return math.pi * (deg + 5.0 * minutes / 3.0) / 180.0


@dataclass(frozen=True)
class Instance:
    """Immutable symmetric TSP instance."""

    name: str
    edge_weight_type: str
    coords: np.ndarray  # (n, 2) float64; unused for EXPLICIT
    matrix: np.ndarray | None = None  # full matrix for EXPLICIT
    _cost_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        if self.edge_weight_type == "EXPLICIT":
            return self.matrix.shape[0]
        return self.coords.shape[0]

    @property
    def integral(self) -> bool:
        return self.edge_weight_type != "EUC_2D_REAL"

    def cost(self, i: int, j: int):
        """Cost of edge (i, j).  Rejects self-loops."""
        if i == j:
            raise ValueError(f"self-loop cost requested for vertex {i}")
        return self.cost_matrix()[i, j]

    def cost_matrix(self) -> np.ndarray:
        """Full symmetric cost matrix, computed once and cached."""
        cached = self._cost_cache.get("matrix")
        if cached is None:
            cached = self._build_matrix()
            self._cost_cache["matrix"] = cached
        return cached

    def _build_matrix(self) -> np.ndarray:
        if self.edge_weight_type == "EXPLICIT":
            return self.matrix
        xy = self.coords
        if self.edge_weight_type == "GEO":
            lat = np.array([_geo_radians(c) for c in xy[:, 0]])
            lon = np.array([_geo_radians(c) for c in xy[:, 1]])
            q1 = np.cos(lon[:, None] - lon[None, :])
            q2 = np.cos(lat[:, None] - lat[None, :])
            q3 = np.cos(lat[:, None] + lat[None, :])
            arg = 0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)
            arg = np.clip(arg, -1.0, 1.0)
            d = (GEO_RADIUS * np.arccos(arg) + 1.0).astype(np.int64)
            np.fill_diagonal(d, 0)
            return d
        dx = xy[:, 0, None] - xy[None, :, 0]
        dy = xy[:, 1, None] - xy[None, :, 1]
        if self.edge_weight_type == "EUC_2D":
            d = np.floor(np.sqrt(dx * dx + dy * dy) + 0.5).astype(np.int64)
        elif self.edge_weight_type == "ATT":
            r = np.sqrt((dx * dx + dy * dy) / 10.0)
            t = np.floor(r + 0.5)
            d = np.where(t < r, t + 1.0, t).astype(np.int64)
        elif self.edge_weight_type == "EUC_2D_REAL":
            d = np.sqrt(dx * dx + dy * dy)
        else:
            raise TsplibError(f"unsupported edge weight type {self.edge_weight_type}")
        if d.dtype.kind == "i":
            np.fill_diagonal(d, 0)
        return d


def from_coords(coords, edge_weight_type="EUC_2D", name="generated") -> Instance:
    coords = np.asarray(coords, dtype=np.float64)
    if coords.ndim != 2 or coords.shape[1] != 2:
        raise ValueError("coords must be an (n, 2) array")
    if coords.shape[0] < 3:
        raise ValueError("instance needs at least 3 vertices")
    if edge_weight_type not in SUPPORTED_EDGE_WEIGHT_TYPES:
        raise TsplibError(f"unsupported edge weight type {edge_weight_type}")
    return Instance(name=name, edge_weight_type=edge_weight_type, coords=coords)


def parse_tsplib(text: str) -> Instance:
    """Parse a TSPLIB .tsp document into an Instance.

    Supports NODE_COORD_SECTION instances with EUC_2D / GEO / ATT edge
    weights and EXPLICIT full-matrix instances as far as tests need them.
    Unknown harmless keywords are ignored.
    """
    name = "unnamed"
    dimension = None
    ewt = None
    ewf = None
    lines = [ln.strip() for ln in text.splitlines()]
    idx = 0
    coords = None
    matrix = None

    def parse_header(line):
        key, _, value = line.partition(":")
        return key.strip().upper(), value.strip()

    while idx < len(lines):
        line = lines[idx]
        idx += 1
        if not line:
            continue
        upper = line.upper()
        if upper.startswith("NODE_COORD_SECTION"):
            if dimension is None:
                raise TsplibError("missing DIMENSION before NODE_COORD_SECTION")
            coords = np.zeros((dimension, 2))
            seen = 0
            while idx < len(lines) and seen < dimension:
                row = lines[idx].split()
                idx += 1
                if not row:
                    continue
                if row[0].upper() in ("EOF", "DISPLAY_DATA_SECTION"):
                    idx -= 1
                    break
                if len(row) < 3:
                    raise TsplibError(f"bad coordinate line: {lines[idx - 1]!r}")
                v = int(float(row[0])) - 1
                if not 0 <= v < dimension:
                    raise TsplibError(f"vertex index {v + 1} out of range")
                coords[v] = (float(row[1]), float(row[2]))
                seen += 1
            if seen != dimension:
                raise TsplibError(
                    f"expected {dimension} coordinate lines, found {seen}"
                )
        elif upper.startswith("EDGE_WEIGHT_SECTION"):
            if dimension is None:
                raise TsplibError("missing DIMENSION before EDGE_WEIGHT_SECTION")
            values = []
            while idx < len(lines):
                row = lines[idx]
                if not row or row.split()[0].upper() in ("EOF", "DISPLAY_DATA_SECTION"):
                    break
                values.extend(int(float(tok)) for tok in row.split())
                idx += 1
            matrix = _assemble_matrix(values, dimension, ewf or "FULL_MATRIX")
        elif upper.startswith("EOF"):
            break
        elif ":" in line:
            key, value = parse_header(line)
            if key == "NAME":
                name = value
            elif key == "DIMENSION":
                dimension = int(value)
            elif key == "EDGE_WEIGHT_TYPE":
                ewt = value.upper()
                if ewt not in SUPPORTED_EDGE_WEIGHT_TYPES:
                    raise TsplibError(f"unsupported EDGE_WEIGHT_TYPE {value}")
            elif key == "EDGE_WEIGHT_FORMAT":
                ewf = value.upper()
            # TYPE, COMMENT, DISPLAY_DATA_TYPE etc. are harmless

    if dimension is None:
        raise TsplibError("missing DIMENSION")
    if ewt is None:
        raise TsplibError("missing EDGE_WEIGHT_TYPE")
    if dimension < 3:
        raise TsplibError("instance needs at least 3 vertices")
    if ewt == "EXPLICIT":
        if matrix is None:
            raise TsplibError("EXPLICIT instance without EDGE_WEIGHT_SECTION")
        return Instance(name=name, edge_weight_type=ewt,
                        coords=np.zeros((dimension, 2)), matrix=matrix)
    if coords is None:
        raise TsplibError("missing NODE_COORD_SECTION")
    return Instance(name=name, edge_weight_type=ewt, coords=coords)


def _assemble_matrix(values, n, fmt) -> np.ndarray:
    m = np.zeros((n, n), dtype=np.int64)
    it = iter(values)
    try:
        if fmt == "FULL_MATRIX":
            for i in range(n):
                for j in range(n):
                    m[i, j] = next(it)
        elif fmt == "UPPER_ROW":
            for i in range(n):
                for j in range(i + 1, n):
                    m[i, j] = m[j, i] = next(it)
        elif fmt == "LOWER_DIAG_ROW":
            for i in range(n):
                for j in range(i + 1):
                    m[i, j] = m[j, i] = next(it)
        elif fmt == "UPPER_DIAG_ROW":
            for i in range(n):
                for j in range(i, n):
                    m[i, j] = m[j, i] = next(it)
        else:
            raise TsplibError(f"unsupported EDGE_WEIGHT_FORMAT {fmt}")
    except StopIteration:
        raise TsplibError("EDGE_WEIGHT_SECTION has too few values") from None
    return m


def to_tsplib(inst: Instance) -> str:
    """Serialize a coordinate instance back to TSPLIB text."""
    if inst.edge_weight_type == "EXPLICIT":
        raise TsplibError("EXPLICIT instances are not serialized")
    out = [
        f"NAME : {inst.name}",
        "TYPE : TSP",
        f"DIMENSION : {inst.n}",
        f"EDGE_WEIGHT_TYPE : {inst.edge_weight_type}",
        "NODE_COORD_SECTION",
    ]
    for v, (x, y) in enumerate(inst.coords, start=1):
        out.append(f"{v} {float(x)!r} {float(y)!r}")
    out.append("EOF")
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class Tour:
    """A closed tour given as a vertex permutation plus its length."""

    order: tuple
    length: float

    @property
    def n(self) -> int:
        return len(self.order)

    def edges(self):
        """Undirected edge set {(min, max), ...} of the cycle."""
        n = len(self.order)
        out = set()
        for t in range(n):
            i, j = self.order[t], self.order[(t + 1) % n]
            out.add((i, j) if i < j else (j, i))
        return out


def tour_length(inst: Instance, order) -> float:
    """Cyclic tour cost; rejects non-permutations."""
    order = list(order)
    n = inst.n
    if sorted(order) != list(range(n)):
        raise ValueError("tour order is not a permutation of the vertex set")
    m = inst.cost_matrix()
    idx = np.asarray(order)
    total = m[idx, np.roll(idx, -1)].sum()
    return int(total) if inst.integral else float(total)


def make_tour(inst: Instance, order) -> Tour:
    return Tour(order=tuple(order), length=tour_length(inst, order))


def percentage_error(length, opt) -> float:
    """Percentage gap of a tour length over the reference optimum."""
    if opt <= 0:
        raise ValueError("reference optimum must be positive")
    return 100.0 * (length - opt) / opt


@dataclass(frozen=True)
class GapReport:
    name: str
    length: float
    optimum: float

    @property
    def gap(self) -> float:
        return percentage_error(self.length, self.optimum)


def parse_opt_tour(text: str) -> list:
    """Parse a TSPLIB .opt.tour / .tour file into a 0-based vertex order."""
    order = []
    in_section = False
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.upper().startswith("TOUR_SECTION"):
            in_section = True
            continue
        if not in_section:
            continue
        for tok in line.split():
            v = int(tok)
            if v == -1:
                return order
            order.append(v - 1)
        if line.upper().startswith("EOF"):
            break
    if not order:
        raise TsplibError("no TOUR_SECTION found")
    return order


def write_tour(name: str, order) -> str:
    """Render a tour in TSPLIB .tour text (1-based, -1 terminated)."""
    lines = [
        f"NAME : {name}",
        "TYPE : TOUR",
        f"DIMENSION : {len(order)}",
        "TOUR_SECTION",
    ]
    lines.extend(str(v + 1) for v in order)
    lines.append("-1")
    lines.append("EOF")
    return "\n".join(lines) + "\n"
