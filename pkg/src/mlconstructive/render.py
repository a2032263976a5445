"""Local-context image renderer for candidate edges.

A 96x96x3 binary image: red channel marks the vertices of the local view
(the union of both extremes' candidate lists), green the candidate edge,
blue the accepted partial-solution edges whose endpoints are both visible.
The view is translated so the edge midpoint sits at the image center and
scaled so every vertex lies inside the inscribed circle.
"""

from __future__ import annotations

import struct

import numpy as np

SIZE = 96
CENTER = SIZE // 2
RADIUS_MARGIN = 1.0 / 48.0  # keeps extreme points off the boundary circle
MARK_HALF = 1  # vertices dilate to 3x3 squares

RED, GREEN, BLUE = 0, 1, 2


def local_view(cls, i: int, j: int) -> list:
    """Vertices drawn for edge (i, j): CL[i] union CL[j] union {i, j}."""
    verts = set(cls.neighbors[i].tolist())
    verts.update(cls.neighbors[j].tolist())
    verts.add(i)
    verts.add(j)
    return sorted(verts)


def _project(coords, verts, i, j):
    """Pixel coordinates of the view vertices after center/scale normalization."""
    pts = coords[verts]
    center = 0.5 * (coords[i] + coords[j])
    rel = pts - center
    rmax = float(np.max(np.hypot(rel[:, 0], rel[:, 1])))
    if rmax == 0.0:
        scaled = np.zeros_like(rel)
    else:
        scale = (CENTER * (1.0 - RADIUS_MARGIN)) / rmax
        scaled = rel * scale
    px = np.rint(CENTER + scaled[:, 0]).astype(int)
    py = np.rint(CENTER - scaled[:, 1]).astype(int)
    return {v: (int(x), int(y)) for v, x, y in zip(verts, px, py)}


def _mark(img, channel, x, y):
    x0, x1 = max(x - MARK_HALF, 0), min(x + MARK_HALF, SIZE - 1)
    y0, y1 = max(y - MARK_HALF, 0), min(y + MARK_HALF, SIZE - 1)
    img[y0 : y1 + 1, x0 : x1 + 1, channel] = 1.0


def _line(img, channel, x0, y0, x1, y1):
    """Bresenham segment, endpoints included."""
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    x, y = x0, y0
    while True:
        if 0 <= x < SIZE and 0 <= y < SIZE:
            img[y, x, channel] = 1.0
        if x == x1 and y == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x += sx
        if e2 <= dx:
            err += dx
            y += sy


def render_context(inst, cls, ps, i: int, j: int) -> np.ndarray:
    """Render the candidate edge (i, j) against the current partial solution."""
    verts = local_view(cls, i, j)
    pos = _project(inst.coords, verts, i, j)
    img = np.zeros((SIZE, SIZE, 3), dtype=np.float32)
    for v in verts:
        _mark(img, RED, *pos[v])
    _line(img, GREEN, *pos[i], *pos[j])
    _mark(img, GREEN, *pos[i])
    _mark(img, GREEN, *pos[j])
    if ps is not None:
        vset = set(verts)
        for a, b in ps.edges:
            if a in vset and b in vset:
                _line(img, BLUE, *pos[a], *pos[b])
    return img


class OfflineEdgeSource:
    """Blue-channel source replaying optimal-tour edges in promising-list order.

    Feed the promising entries one at a time; before rendering entry t the
    partial state holds every optimal edge that appeared strictly earlier
    in the list.
    """

    def __init__(self, n, optimal_edges):
        from .fragments import PartialSolution

        self.optimal_edges = {
            (a, b) if a < b else (b, a) for a, b in optimal_edges
        }
        self.ps = PartialSolution(n)

    def advance(self, i, j):
        """Record entry (i, j) as processed; inserts it if optimal."""
        key = (i, j) if i < j else (j, i)
        if key in self.optimal_edges and key not in self.ps.edges:
            self.ps.accept_edge(i, j)


def to_ppm(img: np.ndarray) -> bytes:
    """Binary P6 dump for eyeballing."""
    header = f"P6 {SIZE} {SIZE} 255\n".encode()
    body = (np.clip(img, 0.0, 1.0) * 255).astype(np.uint8).tobytes()
    return header + body


def to_blob(img: np.ndarray) -> bytes:
    """Raw little-endian float32 blob, the exact trainer input format."""
    return img.astype("<f4").tobytes()


def from_blob(data: bytes) -> np.ndarray:
    expected = SIZE * SIZE * 3 * 4
    if len(data) != expected:
        raise ValueError(f"blob must be {expected} bytes, got {len(data)}")
    return np.frombuffer(data, dtype="<f4").reshape(SIZE, SIZE, 3).copy()
