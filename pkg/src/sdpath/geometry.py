"""Small vectorised geometric kernels and the Path polyline type."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def point_segment_distance(p, a, b):
    """Distance from point(s) ``p`` to segment(s) ``ab`` in 3D.

    All arguments broadcast against each other on their leading axes.
    """
    p = np.asarray(p, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ab = b - a
    ap = p - a
    denom = np.einsum("...i,...i->...", ab, ab)
    t = np.einsum("...i,...i->...", ap, ab) / np.where(denom > 0, denom, 1.0)
    t = np.clip(t, 0.0, 1.0)
    closest = a + t[..., None] * ab
    return np.linalg.norm(p - closest, axis=-1)


def point_triangle_distance(p, a, b, c):
    """Distance from point(s) ``p`` to the closed triangle(s) ``abc`` in 3D."""
    p = np.asarray(p, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    p, a, b, c = np.broadcast_arrays(p, a, b, c)
    n = np.cross(b - a, c - a)
    nn = np.linalg.norm(n, axis=-1)
    safe = np.where(nn > 0, nn, 1.0)
    unit = n / safe[..., None]
    plane_dist = np.einsum("...i,...i->...", p - a, unit)
    q = p - plane_dist[..., None] * unit
    # q is inside iff it is on the inner side of all three edges
    s0 = np.einsum("...i,...i->...", np.cross(b - a, q - a), n)
    s1 = np.einsum("...i,...i->...", np.cross(c - b, q - b), n)
    s2 = np.einsum("...i,...i->...", np.cross(a - c, q - c), n)
    inside = (s0 >= 0) & (s1 >= 0) & (s2 >= 0) & (nn > 0)
    edge_dist = np.minimum(
        np.minimum(point_segment_distance(p, a, b), point_segment_distance(p, b, c)),
        point_segment_distance(p, c, a),
    )
    return np.where(inside, np.abs(plane_dist), edge_dist)


def triangle_area(a, b, c):
    return 0.5 * np.linalg.norm(np.cross(np.asarray(b) - a, np.asarray(c) - a), axis=-1)


def triangle_area_xy(a, b, c):
    """Signed area of the xy-projection (positive for counter-clockwise)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    return 0.5 * (
        (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1])
        - (c[..., 0] - a[..., 0]) * (b[..., 1] - a[..., 1])
    )


def barycentric_xy(p, a, b, c):
    """Barycentric coordinates of the xy-projection of ``p`` in ``abc``."""
    p = np.asarray(p, dtype=float)
    area = triangle_area_xy(a, b, c)
    area = np.where(area != 0, area, np.nan)
    l0 = triangle_area_xy(p, b, c) / area
    l1 = triangle_area_xy(a, p, c) / area
    l2 = 1.0 - l0 - l1
    return np.stack([l0, l1, l2], axis=-1)


def polyline_length(points) -> float:
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        return 0.0
    return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())


@dataclass(frozen=True)
class Path:
    """A polyline of surface points, listed from start to end.

    ``face_trace`` optionally names the face holding each segment.
    """

    points: np.ndarray
    length: float = field(default=None)
    face_trace: tuple | None = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, 3)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.length is None:
            object.__setattr__(self, "length", polyline_length(pts))

    def __len__(self):
        return len(self.points)

    @property
    def heights(self) -> np.ndarray:
        return self.points[:, 2]

    def to_json(self) -> dict:
        return {"points": self.points.tolist(), "length": float(self.length)}

    @classmethod
    def from_json(cls, obj) -> "Path":
        if isinstance(obj, dict):
            return cls(obj["points"])
        return cls(obj)
