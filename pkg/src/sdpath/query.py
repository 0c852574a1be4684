"""Approximate shortest descending paths from the tree root to any surface point."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discretizer import Discretization, discretize
from .errors import NoDescendingPathError, OffSurfaceError, WrongLocationKindError
from .geometry import Path
from .graph import DescendGraph
from .sssp import SPTree, bushwhack, dijkstra, extract_path
from .terrain import (
    EDGE,
    FACE,
    OFF_SURFACE,
    VERTEX,
    Location,
    Terrain,
    geometry_params,
    insert_source,
    locate,
)

TREE_NODE = "tree-node"
INTERIOR_POINT = "interior-point"

SOLVERS = {"dijkstra": dijkstra, "bushwhack": bushwhack}


@dataclass(frozen=True)
class QueryAnswer:
    path: Path
    length: float
    terminal_kind: str
    last_hop: int | None = None

    def to_json(self) -> dict:
        return {
            "points": self.path.points.tolist(),
            "length": float(self.length),
            "terminal_kind": self.terminal_kind,
            "last_hop": self.last_hop,
        }


def candidate_nodes(t: Terrain, d: Discretization, loc: Location) -> np.ndarray:
    """Nodes that may serve as the last hop into a non-node point.

    Face-interior: every node on the face's three edges.  Edge-interior on
    ``e``: every node on the other edges of the faces beside ``e`` plus those
    faces' vertices; the interior nodes of ``e`` itself are excluded.
    """
    if loc.kind == FACE:
        nodes = [d.edge_nodes(e) for e in t.face_edges[loc.index]]
    elif loc.kind == EDGE:
        e = loc.index
        nodes = []
        for f in t.edge_faces[e]:
            nodes.append(t.triangles[f])
            nodes += [d.edge_nodes(o) for o in t.face_edges[f] if o != e]
    else:
        raise WrongLocationKindError(f"candidate nodes are defined for face or edge interiors, not {loc.kind}")
    return np.unique(np.concatenate(nodes)).astype(np.int64)


def _node_on_edge(t: Terrain, d: Discretization, loc: Location):
    """Steiner node coinciding with an edge-interior location, if any."""
    e = loc.index
    ids = d.steiner_ids(e)
    if len(ids) == 0:
        return None
    s = loc.coords[0]
    params = d.node_param[ids]
    k = int(np.argmin(np.abs(params - s)))
    i, j = t.edges[e]
    length = float(np.linalg.norm(t.vertices[j] - t.vertices[i]))
    tol = 1e-9 * t.bbox_diagonal
    if abs(params[k] - s) * length <= tol:
        return int(ids[k])
    return None


def query(t: Terrain, d: Discretization, tree: SPTree, v) -> QueryAnswer:
    v = np.asarray(v, dtype=float)
    loc = locate(t, v)
    if loc.kind == OFF_SURFACE:
        raise OffSurfaceError(f"query point {v.tolist()} is not on the terrain surface")
    node = None
    if loc.kind == VERTEX:
        node = loc.index
    elif loc.kind == EDGE:
        node = _node_on_edge(t, d, loc)
    if node is not None:
        path = extract_path(tree, node)
        return QueryAnswer(path, path.length, TREE_NODE, None)
    cand = candidate_nodes(t, d, loc)
    ok = (d.heights[cand] >= v[2]) & np.isfinite(tree.dist[cand])
    cand = cand[ok]
    if len(cand) == 0:
        raise NoDescendingPathError(f"no descending path reaches {v.tolist()}")
    total = tree.dist[cand] + np.linalg.norm(d.positions[cand] - v, axis=1)
    # np.unique sorted the candidates, so argmin breaks ties by smaller id
    k = int(np.argmin(total))
    u = int(cand[k])
    nodes = tree.path_nodes(u)
    pts = np.vstack([d.positions[nodes], v])
    return QueryAnswer(Path(pts, length=float(total[k])), float(total[k]), INTERIOR_POINT, u)


class Solver:
    """Preprocessing for one source and epsilon, then repeated queries.

    ``source`` is a vertex id or a 3D surface point; a point is inserted as a
    new vertex first.
    """

    def __init__(self, terrain: Terrain, epsilon: float, source=None, solver: str = "dijkstra",
                 edge_chords: bool = False):
        if source is None:
            source = terrain.source
        if source is None:
            raise ValueError("no source given and the terrain does not name one")
        if np.ndim(source) == 0:
            terrain = terrain.with_source(int(source))
            src = int(source)
        else:
            terrain, src = insert_source(terrain, source)
        self.terrain = terrain
        self.source = src
        self.epsilon = epsilon
        self.params = geometry_params(terrain)
        self.disc = discretize(terrain, epsilon, self.params)
        self.graph = DescendGraph(self.disc, edge_chords=edge_chords)
        self.tree = SOLVERS[solver](self.graph, src)

    def query(self, v) -> QueryAnswer:
        return query(self.terrain, self.disc, self.tree, v)

    def path_to_node(self, node: int) -> Path:
        return extract_path(self.tree, node)

    def length(self, v) -> float:
        """Approximate SDP length to ``v``, or ``inf`` when none exists."""
        try:
            return self.query(v).length
        except NoDescendingPathError:
            return float("inf")
