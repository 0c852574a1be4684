"""Deterministic terrain families for tests, demos and benchmarks."""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial import Delaunay

from .terrain import Terrain, validate

FAMILIES = ("ramp", "skinny", "nearlevel", "random", "strip", "twoface")


def ramp(size: float = 1.0) -> Terrain:
    """Two triangles ABC, BDC falling from the edge AB (z = size) to CD (z = 0)."""
    if not size > 0:
        raise ValueError("ramp size must be positive")
    V = np.array([[0, 0, 1], [1, 0, 1], [0, 1, 0], [1, 1, 0]], dtype=float) * size
    return Terrain(V, [[0, 1, 2], [1, 3, 2]], source=0)


def horizontal_triangle(side: float = 1.0, z: float = 0.0) -> Terrain:
    V = [[0, 0, z], [side, 0, z], [side / 2, side * math.sqrt(3) / 2, z]]
    return Terrain(V, [[0, 1, 2]], source=0)


def skinny(aspect: float = 10.0) -> Terrain:
    """A long strip made of two thin faces whose longest-edge-to-height ratio
    is at least ``aspect``.

    The strip falls steadily along its length with a slight fold along the
    diagonal; the highest vertex (the source) sits at one end so paths must
    cross the long shared edge.
    """
    if not aspect >= 1:
        raise ValueError("skinny aspect ratio must be >= 1")
    a, w, s, t = float(aspect), 1.0, 0.5, 0.4
    V = [
        [0.0, 0.0, s * a],
        [a, 0.0, -0.1],
        [0.0, w, s * a + t * w],
        [a, w, t * w],
    ]
    return Terrain(V, [[0, 1, 3], [0, 3, 2]], source=2)


def nearlevel(tilt: float = 0.05) -> Terrain:
    """A terrain around a face ``PQR`` that is only ``tilt`` radians away from
    level.

    The faces beside ``PQR`` are stretched outwards and down rather than made
    thin, so the near-level face is the only extreme feature.  All slopes are
    of order ``tilt`` which keeps the vertical extent, and hence the node
    count, small.
    """
    if not 0 < tilt < math.pi / 2:
        raise ValueError("nearlevel tilt must lie in (0, pi/2)")
    s = math.tan(tilt)
    V = [
        [1.0, -1.2, 1.5 * s],    # S, source above the level edge PQ
        [0.0, 0.0, 0.0],         # P
        [2.0, 0.0, 0.0],         # Q
        [1.0, 1.6, -1.6 * s],    # R
        [-1.2, 2.2, -3.2 * s],   # U, pushed out along PR and further down
        [3.2, 2.2, -3.2 * s],    # W, pushed out along QR and further down
    ]
    F = [[0, 1, 2], [1, 3, 2], [1, 4, 3], [2, 3, 5], [3, 4, 5]]
    return Terrain(V, F, source=0)


def random_terrain(seed: int = 0, rings: int = 1, rise: float = 1.0,
                   jitter: float = 0.15, noise: float = 0.1) -> Terrain:
    """Delaunay triangulation of a jittered hexagonal lattice.

    Heights follow the 3-colouring of the triangular lattice (levels 0, 1, 2
    times ``rise``) plus uniform noise, so no edge is close to level and
    every face is reasonably shaped.  The highest vertex is the source.
    """
    if rings < 1:
        raise ValueError("rings must be >= 1")
    rng = np.random.default_rng(seed)
    ij = [(i, j) for i in range(-rings, rings + 1) for j in range(-rings, rings + 1)
          if abs(i) <= rings and abs(j) <= rings and abs(i + j) <= rings]
    ij = np.array(ij, dtype=float)
    xy = np.column_stack([ij[:, 0] + 0.5 * ij[:, 1], ij[:, 1] * math.sqrt(3) / 2])
    xy += rng.uniform(-jitter, jitter, size=xy.shape)
    level = np.mod(ij[:, 0] + 2 * ij[:, 1], 3)
    z = rise * (level + rng.uniform(-noise, noise, size=len(xy)))
    tri = Delaunay(xy).simplices
    V = np.column_stack([xy, z])
    return Terrain(V, tri, source=int(np.argmax(z)))


def strip() -> Terrain:
    """Four faces in a row that a path from ``s`` can cross only by staying
    exactly at ``z = 1``: every edge it crosses dips below 1 at one end.

    Height-blind Steiner points miss the crossing heights, so no descending
    path through them exists; slicing at vertex heights places a node at
    ``z = 1`` on each crossed edge.
    """
    V = [
        [0.0, 0.0, 1.0],    # s
        [1.0, 1.0, 1.6],    # T1
        [1.2, -1.0, 0.3],   # B1
        [2.3, 1.1, 1.8],    # T2
        [3.1, -0.9, 0.2],   # B2
        [4.0, 0.2, 1.2],    # E
    ]
    F = [[0, 2, 1], [2, 3, 1], [2, 4, 3], [4, 5, 3]]
    return Terrain(V, F, source=0)


def strip_isoline(t: Terrain, level: float = 1.0):
    """Exact descending path on :func:`strip` from ``s`` along ``z = level``
    to a point of the last face; returns ``(points, target)``."""
    V = t.vertices

    def cut(a, b):
        pa, pb = V[a], V[b]
        lam = (level - pa[2]) / (pb[2] - pa[2])
        q = pa + lam * (pb - pa)
        q[2] = level
        return q

    c1, c2, c3 = cut(2, 1), cut(2, 3), cut(4, 3)
    # the z = level segment of the last face runs from c3 (on B2-T2) to a
    # point on B2-E; take a point strictly between them
    c4 = cut(4, 5)
    v = 0.5 * (c3 + c4)
    v[2] = level
    return np.array([V[0], c1, c2, c3, v]), v


def two_face(seed: int = 0) -> Terrain:
    """Random pair of faces ``ABC`` and ``BDC`` sharing ``BC`` with ``A`` the
    highest vertex (the source) and ``D`` the lowest."""
    rng = np.random.default_rng(seed)
    A = [0.0, rng.uniform(-0.3, 0.3), rng.uniform(1.5, 2.5)]
    B = [rng.uniform(0.8, 1.2), rng.uniform(0.6, 1.2), rng.uniform(0.6, 1.4)]
    C = [rng.uniform(0.8, 1.2), rng.uniform(-1.2, -0.6), rng.uniform(0.6, 1.4)]
    D = [rng.uniform(1.8, 2.2), rng.uniform(-0.3, 0.3), rng.uniform(-0.5, 0.4)]
    return Terrain([A, B, C, D], [[0, 1, 2], [1, 3, 2]], source=0)


def generate(family: str, param: float | None = None, seed: int = 0) -> Terrain:
    """Dispatch to a family; ``param`` is the family's single shape knob."""
    if family == "ramp":
        t = ramp(1.0 if param is None else param)
    elif family == "skinny":
        t = skinny(10.0 if param is None else param)
    elif family == "nearlevel":
        t = nearlevel(0.05 if param is None else param)
    elif family == "random":
        t = random_terrain(seed, rings=1 if param is None else int(param))
    elif family == "strip":
        t = strip()
    elif family == "twoface":
        t = two_face(seed)
    else:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    report = validate(t)
    if not report.ok:
        raise AssertionError(f"generator produced an invalid terrain: {report}")
    return t
