"""Steiner-point placement by slicing the terrain with horizontal planes.

Every non-level edge receives a node wherever it meets a plane ``z = j*delta``
or a plane through the height of some terrain vertex; level edges are cut
into equal pieces no longer than ``delta * sec(theta)``.  Because every edge
carries a node at each vertex height, a path can be routed through a chain of
faces without being forced to lose height.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EpsilonDomainError, UnknownNodeError
from .terrain import GeomParams, Terrain, geometry_params

MERGE_RTOL = 1e-12


def compute_delta(params: GeomParams, epsilon: float, n: int) -> float:
    """Plane spacing ``epsilon * h * cos(theta) / (4 n)``."""
    if not (0 < epsilon <= 1):
        raise EpsilonDomainError(f"epsilon must lie in (0, 1], got {epsilon}")
    if n < 3:
        raise ValueError(f"a terrain needs at least 3 vertices, got {n}")
    return epsilon * params.h * params.cos_theta / (4 * n)


def node_count_bound(params: GeomParams, epsilon: float, n: int) -> float:
    """Per-edge node bound ``c = 5 n (L/h) (1/epsilon) sec(theta)``."""
    return 5 * n * (params.L / params.h) * (1.0 / epsilon) * params.sec_theta


@dataclass(frozen=True)
class NodeInfo:
    id: int
    position: np.ndarray
    height: float
    vertex: int | None
    edges: tuple
    param: float | None


class Discretization:
    """Vertices plus Steiner points, indexed globally.

    Vertices keep their terrain ids ``0..n-1``; Steiner points follow, grouped
    by edge id and sorted by parameter from the edge's lower-index endpoint.
    """

    def __init__(self, terrain, params, delta, epsilon, positions, heights,
                 node_edge, node_param, edge_offsets):
        self.terrain = terrain
        self.params = params
        self.delta = float(delta)
        self.epsilon = epsilon
        for arr in (positions, heights, node_edge, node_param, edge_offsets):
            arr.setflags(write=False)
        self.positions = positions
        self.heights = heights
        self.node_edge = node_edge
        self.node_param = node_param
        self.edge_offsets = edge_offsets
        eps = epsilon if epsilon is not None else self.implied_epsilon
        self.c = node_count_bound(params, eps, terrain.n)

    @property
    def implied_epsilon(self) -> float:
        p = self.params
        return 4 * self.terrain.n * self.delta / (p.h * p.cos_theta)

    @property
    def n_nodes(self) -> int:
        return len(self.heights)

    def __len__(self):
        return self.n_nodes

    def is_vertex(self, node: int) -> bool:
        return 0 <= node < self.terrain.n

    def steiner_ids(self, edge: int) -> np.ndarray:
        n = self.terrain.n
        return np.arange(n + self.edge_offsets[edge], n + self.edge_offsets[edge + 1])

    def edge_nodes(self, edge: int) -> np.ndarray:
        """All nodes of ``edge`` in parameter order, endpoints included."""
        i, j = self.terrain.edges[edge]
        return np.concatenate([[i], self.steiner_ids(edge), [j]]).astype(np.int64)

    def edge_node_counts(self) -> np.ndarray:
        return np.diff(self.edge_offsets) + 2

    def node_edges(self, node: int) -> tuple:
        """Edges that contain ``node``."""
        if self.is_vertex(node):
            return self.terrain.vertex_edges[node]
        return (int(self.node_edge[node]),)

    def node_faces(self, node: int) -> tuple:
        if self.is_vertex(node):
            return self.terrain.vertex_faces[node]
        return self.terrain.edge_faces[int(self.node_edge[node])]

    def check_id(self, node) -> int:
        if isinstance(node, (bool, np.bool_)) or not isinstance(node, (int, np.integer)):
            raise UnknownNodeError(f"node id must be an integer, got {node!r}")
        if not 0 <= node < self.n_nodes:
            raise UnknownNodeError(f"node {node} outside 0..{self.n_nodes - 1}")
        return int(node)

    def node_at(self, node: int) -> NodeInfo:
        node = self.check_id(node)
        if self.is_vertex(node):
            return NodeInfo(node, self.positions[node].copy(), float(self.heights[node]),
                            node, self.node_edges(node), None)
        return NodeInfo(node, self.positions[node].copy(), float(self.heights[node]), None,
                        self.node_edges(node), float(self.node_param[node]))

    def summary(self) -> dict:
        counts = self.edge_node_counts()
        return {
            "delta": self.delta,
            "epsilon": self.epsilon,
            "edge_node_counts": counts.tolist(),
            "total_nodes": self.n_nodes,
            "bound_c": self.c,
            "bound_total": 3 * self.terrain.n * self.c,
        }


def place_steiner(t: Terrain, delta: float, params: GeomParams | None = None,
                  epsilon: float | None = None) -> Discretization:
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if params is None:
        params = geometry_params(t)
    V = t.vertices
    z = t.heights
    vertex_levels = np.unique(z)
    level_step = delta * params.sec_theta
    pos_chunks, h_chunks, s_chunks, e_chunks = [], [], [], []
    offsets = [0]
    for e, (i, j) in enumerate(t.edges.tolist()):
        zi, zj = z[i], z[j]
        if zi == zj:
            length = float(np.linalg.norm(V[j] - V[i]))
            k = max(math.ceil(length / level_step) - 1, 0)
            s = np.arange(1, k + 1) / (k + 1)
            hts = np.full(k, zi)
        else:
            s, hts = _slice_edge(zi, zj, delta, vertex_levels)
        pts = V[i] + s[:, None] * (V[j] - V[i])
        pts[:, 2] = hts
        pos_chunks.append(pts)
        h_chunks.append(hts)
        s_chunks.append(s)
        e_chunks.append(np.full(len(s), e, dtype=np.int64))
        offsets.append(offsets[-1] + len(s))
    n = t.n
    positions = np.vstack([V] + pos_chunks)
    heights = np.concatenate([z] + h_chunks)
    node_edge = np.concatenate([np.full(n, -1, dtype=np.int64)] + e_chunks)
    node_param = np.concatenate([np.full(n, np.nan)] + s_chunks)
    return Discretization(t, params, delta, epsilon, positions, heights, node_edge,
                          node_param, np.array(offsets, dtype=np.int64))


def _slice_edge(zi, zj, delta, vertex_levels):
    """Interior cut parameters and exact heights of a non-level edge."""
    lo, hi = min(zi, zj), max(zi, zj)
    j0 = math.ceil(lo / delta)
    j1 = math.floor(hi / delta)
    planes = np.arange(j0, j1 + 1) * delta
    planes = planes[(planes > lo) & (planes < hi)]
    a = np.searchsorted(vertex_levels, lo, side="right")
    b = np.searchsorted(vertex_levels, hi, side="left")
    levels = vertex_levels[a:b]
    hts = np.concatenate([levels, planes])
    prio = np.concatenate([np.ones(len(levels), dtype=np.int8), np.zeros(len(planes), dtype=np.int8)])
    s = (hts - zi) / (zj - zi)
    keep = (s > MERGE_RTOL) & (s < 1 - MERGE_RTOL)
    s, hts, prio = s[keep], hts[keep], prio[keep]
    if len(s) == 0:
        return s, hts
    order = np.lexsort((-prio, s))
    s, hts, prio = s[order], hts[order], prio[order]
    cluster = np.concatenate([[0], np.cumsum(np.diff(s) > MERGE_RTOL)])
    # within a cluster prefer a vertex-height cut
    pick = np.lexsort((-prio, cluster))
    first = np.unique(cluster[pick], return_index=True)[1]
    chosen = np.sort(pick[first])
    return s[chosen], hts[chosen]


def place_uniform(t: Terrain, per_edge: int, params: GeomParams | None = None) -> Discretization:
    """Height-blind baseline: ``per_edge`` equally spaced points on every edge.

    Not used by the solver; it exists to show what goes wrong when Steiner
    points ignore heights (a path held at one height can miss every node).
    """
    if per_edge < 0:
        raise ValueError("per_edge must be non-negative")
    if params is None:
        params = geometry_params(t)
    V = t.vertices
    s = np.arange(1, per_edge + 1) / (per_edge + 1)
    pos_chunks, e_chunks = [], []
    for e, (i, j) in enumerate(t.edges.tolist()):
        pos_chunks.append(V[i] + s[:, None] * (V[j] - V[i]))
        e_chunks.append(np.full(per_edge, e, dtype=np.int64))
    n = t.n
    positions = np.vstack([V] + pos_chunks)
    node_edge = np.concatenate([np.full(n, -1, dtype=np.int64)] + e_chunks)
    node_param = np.concatenate([np.full(n, np.nan)] + [s] * t.n_edges)
    offsets = np.arange(t.n_edges + 1, dtype=np.int64) * per_edge
    return Discretization(t, params, float("nan"), None, positions, positions[:, 2].copy(),
                          node_edge, node_param, offsets)


def discretize(t: Terrain, epsilon: float, params: GeomParams | None = None) -> Discretization:
    """Geometry parameters, plane spacing and Steiner placement in one call."""
    if params is None:
        params = geometry_params(t)
    delta = compute_delta(params, epsilon, t.n)
    return place_steiner(t, delta, params, epsilon=epsilon)
