"""Independent checks on solver output.

These routines never call into the graph search except where a comparison
against it is the point (``refine_study``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .discretizer import Discretization
from .errors import FacesNotAdjacentError, MalformedPathError
from .geometry import Path, point_triangle_distance
from .terrain import EDGE, VERTEX, Terrain, locate

__all__ = [
    "Path",
    "DescentReport",
    "SnapResult",
    "verify_descending",
    "snap_path",
    "euclid_lower_bound",
    "two_face_exact",
    "refine_study",
    "sample_descending_paths",
]

HEIGHT_ATOL = 1e-9
MEMBER_RTOL = 1e-9


@dataclass
class DescentReport:
    ok: bool
    violation: str | None = None
    segment: int | None = None

    def __bool__(self):
        return self.ok

    def __str__(self):
        return "pass" if self.ok else f"fail: {self.violation}"


def _faces_holding(t: Terrain, pts, tol):
    V, T = t.vertices, t.triangles
    A, B, C = V[T[:, 0]], V[T[:, 1]], V[T[:, 2]]
    inside = np.ones(t.n_faces, dtype=bool)
    for p in pts:
        inside &= point_triangle_distance(p, A, B, C) <= tol
    return np.flatnonzero(inside)


def verify_descending(t: Terrain, p: Path) -> DescentReport:
    """Heights never increase (1e-9 slack) and every segment lies in one face."""
    pts = p.points
    if len(pts) == 0:
        return DescentReport(False, "empty path")
    tol = MEMBER_RTOL * t.bbox_diagonal
    if len(pts) == 1:
        if len(_faces_holding(t, pts, tol)) == 0:
            return DescentReport(False, "point is not on the surface", 0)
        return DescentReport(True)
    for i in range(len(pts) - 1):
        a, b = pts[i], pts[i + 1]
        if b[2] > a[2] + HEIGHT_ATOL:
            return DescentReport(False, f"segment {i} ascends from z={a[2]:.17g} to z={b[2]:.17g}", i)
        if len(_faces_holding(t, (a, b, 0.5 * (a + b)), tol)) == 0:
            return DescentReport(False, f"segment {i} does not lie in any single face", i)
    return DescentReport(True)


@dataclass
class SnapResult:
    snapped: Path
    displacement: np.ndarray
    excess: float
    nodes: list = field(default_factory=list)


def snap_path(t: Terrain, d: Discretization, p: Path) -> SnapResult:
    """Move every interior point up to the nearest node of its edge that is
    not lower than it; vertices stay put and so do both endpoints.

    ``nodes`` gives the node id of each snapped interior point (``None`` for
    the endpoints).
    """
    pts = p.points
    out = [pts[0]]
    disp = [0.0]
    nodes = [None]
    for k in range(1, len(pts) - 1):
        q = pts[k]
        loc = locate(t, q)
        if loc.kind == VERTEX:
            out.append(t.vertices[loc.index])
            disp.append(float(np.linalg.norm(t.vertices[loc.index] - q)))
            nodes.append(loc.index)
            continue
        if loc.kind != EDGE:
            raise MalformedPathError(f"interior point {k} {q.tolist()} is not on a terrain edge")
        seq = d.edge_nodes(loc.index)
        hs = d.heights[seq]
        if hs[0] == hs[-1]:
            pick = seq  # level edge: every node is at the same height
        else:
            pick = seq[hs >= q[2]]
        if len(pick) == 0:
            raise MalformedPathError(f"interior point {k} lies above its edge")
        dist = np.linalg.norm(d.positions[pick] - q, axis=1)
        j = int(np.argmin(dist))
        out.append(d.positions[pick[j]])
        disp.append(float(dist[j]))
        nodes.append(int(pick[j]))
    if len(pts) > 1:
        out.append(pts[-1])
        disp.append(0.0)
        nodes.append(None)
    snapped = Path(np.array(out))
    return SnapResult(snapped, np.array(disp), snapped.length - p.length, nodes)


def euclid_lower_bound(s, v) -> float:
    return float(np.linalg.norm(np.asarray(v, dtype=float) - np.asarray(s, dtype=float)))


def two_face_exact(t: Terrain, s, v, edge: int):
    """Shortest descending path from ``s`` to ``v`` across ``edge`` by unfolding.

    Returns the two-segment path when the unfolded straight segment crosses
    ``edge`` within its endpoints and both halves are non-ascending: that path
    is then the unconstrained geodesic over the two faces, hence exact.
    Returns ``None`` when the construction does not apply.  The answer is exact
    for the whole terrain only if no shorter route leaves the two faces (e.g.
    two-face terrains).
    """
    s = np.asarray(s, dtype=float)
    v = np.asarray(v, dtype=float)
    V = t.vertices
    faces = t.edge_faces[edge]
    tol = MEMBER_RTOL * t.bbox_diagonal
    tri = [V[t.triangles[f]] for f in faces]

    def holding(p):
        return [f for f, tr in zip(faces, tri) if point_triangle_distance(p, *tr) <= tol]

    fs, fv = holding(s), holding(v)
    if not fs or not fv:
        raise FacesNotAdjacentError(f"s and v must lie in the faces beside edge {edge}")
    if set(fs) & set(fv):
        if s[2] >= v[2]:
            return Path([s, v])
        return None
    a, b = V[t.edges[edge, 0]], V[t.edges[edge, 1]]
    length = np.linalg.norm(b - a)
    u = (b - a) / length

    def planar(p):
        w = p - a
        x = float(w @ u)
        return x, float(np.linalg.norm(w - x * u))

    xs, ys = planar(s)
    xv, yv = planar(v)
    frac = ys / (ys + yv)
    xc = xs + frac * (xv - xs)
    if xc < -tol or xc > length + tol:
        return None
    xc = min(max(xc, 0.0), length)
    c = a + xc * u
    if not (s[2] >= c[2] - 1e-12 and c[2] >= v[2] - 1e-12):
        return None
    return Path([s, c, v])


@dataclass
class RefineTable:
    epsilons: list
    rows: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def lengths(self, target_index: int) -> list:
        return [r["length"] for r in self.rows if r["target"] == target_index]


def refine_study(t: Terrain, source, targets, epsilons, solver: str = "dijkstra",
                 atol: float = 1e-9) -> RefineTable:
    """Solve at each epsilon (strictly decreasing) and check that every coarse
    answer is within ``(1 + eps_i)`` of every finer one."""
    from .query import Solver

    eps = list(epsilons)
    if any(not (0 < e <= 1) for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
        raise ValueError("epsilons must be strictly decreasing values in (0, 1]")
    table = RefineTable(eps)
    lengths = np.full((len(targets), len(eps)), np.inf)
    for j, e in enumerate(eps):
        sol = Solver(t, e, source, solver=solver)
        for i, v in enumerate(targets):
            lengths[i, j] = sol.length(v)
            table.rows.append({"target": i, "epsilon": e, "length": float(lengths[i, j])})
    for i in range(len(targets)):
        for a in range(len(eps)):
            for b in range(a + 1, len(eps)):
                coarse, fine = lengths[i, a], lengths[i, b]
                if np.isinf(coarse) and np.isinf(fine):
                    continue
                if not coarse <= (1 + eps[a]) * fine + atol:
                    table.violations.append((i, eps[a], eps[b], float(coarse), float(fine)))
    return table


def sample_descending_paths(t: Terrain, d_aux: Discretization, source: int, rng, count: int,
                            max_steps: int = 8, max_tries: int = 50):
    """Random descending paths from vertex ``source`` built on the nodes of an
    auxiliary (finer) discretisation.

    Each step moves into a face of the current node and on to a node of
    another edge of that face that is no higher; the walk ends at a random
    interior point of a face of the last node, no higher than it, preferring
    a face it has not visited.  Consecutive points never share an edge unless
    both are vertices.
    """
    V, T = t.vertices, t.triangles
    paths = []
    attempts = 0
    while len(paths) < count and attempts < count * max_tries:
        attempts += 1
        cur = source
        pts = [V[source]]
        visited = set()
        steps = int(rng.integers(1, max_steps + 1))
        ok = False
        for step in range(steps + 1):
            faces = list(d_aux.node_faces(cur))
            h = d_aux.heights[cur]
            if step == steps:
                fresh = [f for f in faces if f not in visited] or faces
                f = fresh[int(rng.integers(len(fresh)))]
                q = _interior_point_below(V[T[f]], h, rng)
                if q is not None:
                    pts.append(q)
                    ok = True
                break
            f = faces[int(rng.integers(len(faces)))]
            visited.add(f)
            cand = _next_nodes(t, d_aux, cur, f)
            cand = cand[d_aux.heights[cand] <= h]
            if len(cand) == 0:
                break
            cur = int(cand[int(rng.integers(len(cand)))])
            pts.append(d_aux.positions[cur])
        if ok and len(pts) >= 3:
            paths.append(Path(np.array(pts)))
    return paths


def _next_nodes(t, d, cur, f):
    verts = t.triangles[f]
    if d.is_vertex(cur):
        k = int(np.flatnonzero(verts == cur)[0])
        return d.edge_nodes(t.face_edges[f, k])
    e = int(d.node_edge[cur])
    out = [d.edge_nodes(o) for o in t.face_edges[f] if o != e]
    nodes = np.unique(np.concatenate(out))
    return nodes[~np.isin(nodes, t.edges[e])]


def _interior_point_below(tri, h, rng, tries=64):
    for _ in range(tries):
        w = rng.dirichlet([1.0, 1.0, 1.0])
        if w.min() < 1e-3:
            continue
        q = w @ tri
        if q[2] <= h:
            return q
    return None
