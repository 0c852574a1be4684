"""Triangulated terrains: loading, validation, adjacency, point location and
the geometric parameters that drive the discretisation.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateTerrainError,
    OffSurfaceError,
    TerrainIndexError,
    TerrainParseError,
)
from .geometry import (
    barycentric_xy,
    point_segment_distance,
    point_triangle_distance,
    triangle_area,
    triangle_area_xy,
)

VERTEX = "vertex"
EDGE = "edge-interior"
FACE = "face-interior"
OFF_SURFACE = "off-surface"

LOCATE_RTOL = 1e-9


class Terrain:
    """Indexed triangle mesh whose xy-projection is a planar triangulation.

    Parameters
    ----------
    vertices : (n, 3) array_like
        Vertex coordinates; ``z`` is the height.
    triangles : (m, 3) array_like of int
        0-based vertex indices.
    source : int, optional
        Vertex designated as the path source.

    Edges are the unique unordered vertex pairs, stored as ``(i, j)`` with
    ``i < j`` and sorted lexicographically.  ``face_edges[f, k]`` is the edge
    of face ``f`` opposite its ``k``-th vertex.
    """

    def __init__(self, vertices, triangles, source=None):
        V = np.array(vertices, dtype=float).reshape(-1, 3)
        T = np.array(triangles, dtype=np.int64).reshape(-1, 3)
        if not np.all(np.isfinite(V)):
            raise TerrainParseError("vertex coordinates must be finite")
        n = len(V)
        if T.size and (T.min() < 0 or T.max() >= n):
            bad = int(np.argmax((T < 0).any(axis=1) | (T >= n).any(axis=1)))
            raise TerrainIndexError(
                f"triangle {bad} references vertex outside 0..{n - 1}: {T[bad].tolist()}"
            )
        if source is not None and not 0 <= int(source) < n:
            raise TerrainIndexError(f"source {source} outside 0..{n - 1}")
        V.setflags(write=False)
        T.setflags(write=False)
        self.vertices = V
        self.triangles = T
        self.source = None if source is None else int(source)
        self._build_adjacency()

    def _build_adjacency(self):
        T = self.triangles
        m = len(T)
        # half-edge k of face f is opposite vertex slot k
        a = T[:, [1, 2, 0]]
        b = T[:, [2, 0, 1]]
        pairs = np.stack([np.minimum(a, b), np.maximum(a, b)], axis=-1).reshape(-1, 2)
        if m:
            edges, inverse = np.unique(pairs, axis=0, return_inverse=True)
            inverse = inverse.reshape(m, 3)
        else:
            edges = np.zeros((0, 2), dtype=np.int64)
            inverse = np.zeros((0, 3), dtype=np.int64)
        edges.setflags(write=False)
        inverse.setflags(write=False)
        self.edges = edges
        self.face_edges = inverse
        edge_faces = [[] for _ in range(len(edges))]
        for f in range(m):
            for e in inverse[f]:
                if f not in edge_faces[e]:
                    edge_faces[e].append(f)
        self.edge_faces = tuple(tuple(fs) for fs in edge_faces)
        vertex_faces = [[] for _ in range(self.n)]
        for f, tri in enumerate(T.tolist()):
            for v in set(tri):
                vertex_faces[v].append(f)
        self.vertex_faces = tuple(tuple(fs) for fs in vertex_faces)
        vertex_edges = [[] for _ in range(self.n)]
        for e, (i, j) in enumerate(edges.tolist()):
            vertex_edges[i].append(e)
            if j != i:
                vertex_edges[j].append(e)
        self.vertex_edges = tuple(tuple(es) for es in vertex_edges)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.triangles)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def heights(self) -> np.ndarray:
        return self.vertices[:, 2]

    @property
    def bbox_diagonal(self) -> float:
        if self.n == 0:
            return 0.0
        return float(np.linalg.norm(self.vertices.max(axis=0) - self.vertices.min(axis=0)))

    def edge_lengths(self) -> np.ndarray:
        V = self.vertices
        return np.linalg.norm(V[self.edges[:, 1]] - V[self.edges[:, 0]], axis=1)

    def level_edges(self) -> np.ndarray:
        """Boolean mask of edges whose endpoint heights are exactly equal."""
        z = self.heights
        return z[self.edges[:, 0]] == z[self.edges[:, 1]]

    def edge_id(self, i: int, j: int) -> int:
        i, j = min(i, j), max(i, j)
        for e in self.vertex_edges[i]:
            if tuple(self.edges[e]) == (i, j):
                return e
        raise KeyError(f"no edge between vertices {i} and {j}")

    def face_vertices(self, f: int) -> np.ndarray:
        return self.vertices[self.triangles[f]]

    def surface_z(self, x: float, y: float) -> float:
        """Height of the surface above ``(x, y)``; raises if outside the terrain."""
        V = self.vertices
        T = self.triangles
        lam = barycentric_xy(np.array([x, y, 0.0]), V[T[:, 0]], V[T[:, 1]], V[T[:, 2]])
        tol = 1e-12
        inside = np.all(lam >= -tol, axis=1)
        if not inside.any():
            raise OffSurfaceError(f"({x}, {y}) is outside the terrain's xy-footprint")
        f = int(np.flatnonzero(inside)[0])
        return float(lam[f] @ V[T[f], 2])

    def with_source(self, source: int) -> "Terrain":
        return Terrain(self.vertices, self.triangles, source=source)

    def to_json(self) -> dict:
        out = {"vertices": self.vertices.tolist(), "triangles": self.triangles.tolist()}
        if self.source is not None:
            out["source"] = self.source
        return out

    def __repr__(self):
        return f"Terrain(n={self.n}, faces={self.n_faces}, edges={self.n_edges})"


@dataclass(frozen=True)
class GeomParams:
    """Longest edge ``L``, minimum in-face vertex-edge distance ``h``, the
    largest angle ``theta`` between a non-level edge and the vertical, and
    ``X = (L / h) sec(theta)``."""

    L: float
    h: float
    theta: float
    cos_theta: float
    sec_theta: float
    X: float


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    def add(self, kind: str, detail: str):
        self.violations.append((kind, detail))

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set:
        return {k for k, _ in self.violations}

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "valid"
        return "\n".join(f"{k}: {d}" for k, d in self.violations)


@dataclass(frozen=True, eq=False)
class Location:
    """Where a query point sits on the terrain.

    ``index`` is a vertex, edge or face id depending on ``kind``; ``coords``
    holds the edge parameter (from the lower-index endpoint) or the three
    barycentric weights of the face's vertices.
    """

    kind: str
    index: int | None = None
    coords: tuple = ()
    point: tuple = ()

    def __eq__(self, other):
        if not isinstance(other, Location):
            return NotImplemented
        if self.kind != other.kind or self.index != other.index:
            return False
        if len(self.coords) != len(other.coords):
            return False
        return bool(np.allclose(self.coords, other.coords, rtol=0, atol=1e-9))

    def __hash__(self):
        return hash((self.kind, self.index))


# ---------------------------------------------------------------------------
# loading / saving


def load_terrain(data, format: str = "json") -> Terrain:
    """Parse a terrain from bytes, text or a readable file object.

    Adjacency is built but :func:`validate` is *not* run.
    """
    if hasattr(data, "read"):
        data = data.read()
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    fmt = format.lower()
    if fmt == "json":
        return _load_json(data)
    if fmt == "off":
        return _load_off(data)
    raise ValueError(f"unknown terrain format {format!r}")


def _load_json(text: str) -> Terrain:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TerrainParseError(exc.msg, position=f"line {exc.lineno} column {exc.colno}") from None
    if not isinstance(obj, dict):
        raise TerrainParseError("top level must be an object", position="record 0")
    for key in ("vertices", "triangles"):
        if key not in obj or not isinstance(obj[key], list):
            raise TerrainParseError(f"missing array {key!r}", position="top level")
    verts = []
    for i, v in enumerate(obj["vertices"]):
        if not isinstance(v, list) or len(v) != 3 or not all(_is_number(c) for c in v):
            raise TerrainParseError("vertex must be [x, y, z] numbers", position=f"vertices[{i}]")
        if not all(math.isfinite(c) for c in v):
            raise TerrainParseError("vertex coordinates must be finite", position=f"vertices[{i}]")
        verts.append(v)
    tris = []
    for i, t in enumerate(obj["triangles"]):
        if not isinstance(t, list) or len(t) != 3 or not all(_is_int(c) for c in t):
            raise TerrainParseError("triangle must be [i, j, k] integers", position=f"triangles[{i}]")
        tris.append(t)
    source = obj.get("source")
    if source is not None and not _is_int(source):
        raise TerrainParseError("source must be a vertex index", position="source")
    return Terrain(np.array(verts, dtype=float).reshape(-1, 3), np.array(tris, dtype=np.int64).reshape(-1, 3), source)


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _load_off(text: str) -> Terrain:
    lines = []
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((lineno, body))
    if not lines or not lines[0][1].startswith("OFF"):
        raise TerrainParseError("missing OFF header", position="line 1")
    head_no, head = lines[0]
    rest = head[3:].split()
    idx = 1
    if not rest:
        if len(lines) < 2:
            raise TerrainParseError("missing element counts", position=f"line {head_no}")
        head_no, counts_line = lines[1]
        rest = counts_line.split()
        idx = 2
    try:
        nv, nf = int(rest[0]), int(rest[1])
    except (IndexError, ValueError):
        raise TerrainParseError("bad element counts", position=f"line {head_no}") from None
    if len(lines) < idx + nv + nf:
        raise TerrainParseError("file ends before all elements were read", position=f"line {lines[-1][0]}")
    verts = np.empty((nv, 3))
    for k in range(nv):
        lineno, body = lines[idx + k]
        parts = body.split()
        try:
            verts[k] = [float(p) for p in parts[:3]]
        except ValueError:
            raise TerrainParseError("bad vertex coordinates", position=f"line {lineno}") from None
        if len(parts) < 3:
            raise TerrainParseError("vertex needs 3 coordinates", position=f"line {lineno}")
        if not np.all(np.isfinite(verts[k])):
            raise TerrainParseError("vertex coordinates must be finite", position=f"line {lineno}")
    tris = np.empty((nf, 3), dtype=np.int64)
    for k in range(nf):
        lineno, body = lines[idx + nv + k]
        try:
            parts = [int(p) for p in body.split()]
        except ValueError:
            raise TerrainParseError("bad face record", position=f"line {lineno}") from None
        if not parts or parts[0] != 3 or len(parts) < 4:
            raise TerrainParseError("only triangular faces are supported", position=f"line {lineno}")
        tris[k] = parts[1:4]
    return Terrain(verts, tris)


def dump_terrain(t: Terrain, format: str = "json") -> str:
    from .serialize import dumps

    if format == "json":
        return dumps(t.to_json()) + "\n"
    if format == "off":
        out = ["OFF", f"{t.n} {t.n_faces} {t.n_edges}"]
        out += [" ".join(f"{c:.17g}" for c in v) for v in t.vertices.tolist()]
        out += ["3 " + " ".join(str(i) for i in tri) for tri in t.triangles.tolist()]
        return "\n".join(out) + "\n"
    raise ValueError(f"unknown terrain format {format!r}")


# ---------------------------------------------------------------------------
# validation and parameters


def validate(t: Terrain) -> ValidationReport:
    """Check non-degeneracy, edge manifoldness and the vertical-line property."""
    report = ValidationReport()
    V, T = t.vertices, t.triangles
    if t.n_faces == 0:
        report.add("empty", "terrain has no triangles")
        return report
    diag = max(t.bbox_diagonal, 1e-300)
    area_tol = 1e-14 * diag * diag
    A, B, C = V[T[:, 0]], V[T[:, 1]], V[T[:, 2]]
    area3 = triangle_area(A, B, C)
    area_xy = np.abs(triangle_area_xy(A, B, C))
    repeated = (T[:, 0] == T[:, 1]) | (T[:, 1] == T[:, 2]) | (T[:, 0] == T[:, 2])
    degenerate = repeated | (area3 <= area_tol) | (area_xy <= area_tol)
    for f in np.flatnonzero(degenerate):
        report.add("degenerate", f"triangle {f} {T[f].tolist()} has zero area (3D {area3[f]:.3g}, xy {area_xy[f]:.3g})")
    for e, faces in enumerate(t.edge_faces):
        if len(faces) > 2:
            report.add("non-manifold", f"edge {t.edges[e].tolist()} borders {len(faces)} faces")
    good = np.flatnonzero(~degenerate)
    for f, g in _overlapping_pairs(V[:, :2], T, good, 1e-12 * diag):
        report.add("overlap", f"xy-projections of triangles {f} and {g} overlap")
    return report


def _overlapping_pairs(P, T, faces, tol):
    tri = P[T[faces]]  # (k, 3, 2)
    lo = tri.min(axis=1)
    hi = tri.max(axis=1)
    order = np.argsort(lo[:, 0], kind="stable")
    for a_pos, a in enumerate(order):
        for b in order[a_pos + 1:]:
            if lo[b, 0] >= hi[a, 0] - tol:
                break
            if lo[b, 1] >= hi[a, 1] - tol or lo[a, 1] >= hi[b, 1] - tol:
                continue
            if _triangles_overlap_2d(tri[a], tri[b], tol):
                fa, fb = int(faces[a]), int(faces[b])
                yield (min(fa, fb), max(fa, fb))


def _triangles_overlap_2d(t1, t2, tol) -> bool:
    """Separating-axis test; touching boundaries do not count as overlap."""
    for tri in (t1, t2):
        for k in range(3):
            d = tri[(k + 1) % 3] - tri[k]
            axis = np.array([-d[1], d[0]])
            norm = math.hypot(*axis)
            if norm == 0:
                continue
            axis /= norm
            p1 = t1 @ axis
            p2 = t2 @ axis
            if p1.max() <= p2.min() + tol or p2.max() <= p1.min() + tol:
                return False
    return True


def geometry_params(t: Terrain) -> GeomParams:
    V, T = t.vertices, t.triangles
    if t.n_faces == 0:
        raise DegenerateTerrainError("terrain has no faces")
    A, B, C = V[T[:, 0]], V[T[:, 1]], V[T[:, 2]]
    if np.any(triangle_area(A, B, C) == 0):
        f = int(np.flatnonzero(triangle_area(A, B, C) == 0)[0])
        raise DegenerateTerrainError(f"face {f} has zero area")
    lengths = t.edge_lengths()
    L = float(lengths.max())
    # each vertex against the opposite edge of every face containing it
    h = float(
        np.min(
            np.stack(
                [
                    point_segment_distance(A, B, C),
                    point_segment_distance(B, C, A),
                    point_segment_distance(C, A, B),
                ]
            )
        )
    )
    if h <= 0:
        raise DegenerateTerrainError("a vertex lies on the opposite edge of its face")
    z = t.heights
    dz = np.abs(z[t.edges[:, 1]] - z[t.edges[:, 0]])
    nonlevel = dz > 0
    if nonlevel.any():
        cos_theta = float(np.min(dz[nonlevel] / lengths[nonlevel]))
        cos_theta = min(cos_theta, 1.0)
    else:
        cos_theta = 1.0
    theta = math.acos(cos_theta)
    sec = 1.0 / cos_theta
    return GeomParams(L=L, h=h, theta=theta, cos_theta=cos_theta, sec_theta=sec, X=(L / h) * sec)


# ---------------------------------------------------------------------------
# point location


def locate(t: Terrain, p) -> Location:
    """Classify ``p`` as a vertex, edge-interior, face-interior or off-surface
    point.  Vertices win over edges, edges over faces, within
    ``1e-9 * bbox diagonal``."""
    p = np.asarray(p, dtype=float)
    V, E, T = t.vertices, t.edges, t.triangles
    tol = LOCATE_RTOL * t.bbox_diagonal
    dv = np.linalg.norm(V - p, axis=1)
    i = int(np.argmin(dv))
    if dv[i] <= tol:
        return Location(VERTEX, i, (), tuple(V[i]))
    a, b = V[E[:, 0]], V[E[:, 1]]
    de = point_segment_distance(p, a, b)
    e = int(np.argmin(de))
    if de[e] <= tol:
        ab = b[e] - a[e]
        s = float(np.dot(p - a[e], ab) / np.dot(ab, ab))
        s = min(max(s, 0.0), 1.0)
        return Location(EDGE, e, (s,), tuple(a[e] + s * ab))
    A, B, C = V[T[:, 0]], V[T[:, 1]], V[T[:, 2]]
    df = point_triangle_distance(p, A, B, C)
    f = int(np.argmin(df))
    if df[f] <= tol:
        lam = barycentric_xy(p, A[f], B[f], C[f])
        lam = np.clip(lam, 0.0, 1.0)
        lam = lam / lam.sum()
        return Location(FACE, f, tuple(float(x) for x in lam), tuple(lam @ V[T[f]]))
    return Location(OFF_SURFACE, None, (), tuple(p))


def reconstruct(t: Terrain, loc: Location) -> np.ndarray:
    if loc.kind == VERTEX:
        return t.vertices[loc.index].copy()
    if loc.kind == EDGE:
        i, j = t.edges[loc.index]
        s = loc.coords[0]
        return t.vertices[i] + s * (t.vertices[j] - t.vertices[i])
    if loc.kind == FACE:
        return np.asarray(loc.coords) @ t.vertices[t.triangles[loc.index]]
    return np.asarray(loc.point, dtype=float)


def insert_source(t: Terrain, p) -> tuple[Terrain, int]:
    """Make ``p`` a vertex (splitting the face or edge it lies in) and mark it
    as the source.  Returns the new terrain and the vertex id."""
    loc = locate(t, p)
    if loc.kind == OFF_SURFACE:
        raise OffSurfaceError(f"point {np.asarray(p).tolist()} is not on the terrain surface")
    if loc.kind == VERTEX:
        return t.with_source(loc.index), loc.index
    q = reconstruct(t, loc)
    new_id = t.n
    V = np.vstack([t.vertices, q])
    tris = t.triangles.tolist()
    if loc.kind == FACE:
        f = loc.index
        a, b, c = tris[f]
        tris[f] = [a, b, new_id]
        tris.append([b, c, new_id])
        tris.append([c, a, new_id])
    else:
        i, j = t.edges[loc.index].tolist()
        for f in t.edge_faces[loc.index]:
            tri = tris[f]
            tris[f] = [new_id if v == j else v for v in tri]
            tris.append([new_id if v == i else v for v in tri])
    out = Terrain(V, tris, source=new_id)
    return out, new_id
