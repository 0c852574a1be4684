"""Single-source shortest paths over the implicit descending graph."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .errors import NoDescendingPathError
from .geometry import Path
from ._kernels import dijkstra_kernel
from .graph import DescendGraph


@dataclass(frozen=True)
class SPTree:
    """Shortest-path tree rooted at ``root``.

    ``parent[u]`` is -1 for the root and for unreachable nodes; ``order``
    lists nodes in the order they were settled.
    """

    root: int
    dist: np.ndarray
    parent: np.ndarray
    order: np.ndarray
    positions: np.ndarray

    def reachable(self, node: int) -> bool:
        return bool(np.isfinite(self.dist[node]))

    def path_nodes(self, target: int) -> list:
        if not self.reachable(target):
            raise NoDescendingPathError(f"node {target} is not reachable by a descending path")
        seq = [int(target)]
        while seq[-1] != self.root:
            seq.append(int(self.parent[seq[-1]]))
        return seq[::-1]

    @property
    def n_settled(self) -> int:
        return len(self.order)


def _freeze(root, dist, parent, order, positions):
    for arr in (dist, parent, order):
        arr.setflags(write=False)
    return SPTree(int(root), dist, parent, order, positions)


def dijkstra(g: DescendGraph, source: int) -> SPTree:
    """Dijkstra with an indexed binary heap (decrease-key) and a settled mask.

    Ties on tentative distance are resolved in favour of the smaller node id.
    """
    source = g.disc.check_id(source)
    dist, parent, order = dijkstra_kernel(source, **g.flat)
    return _freeze(source, dist, parent, order, g.positions)


def extract_path(tree: SPTree, target: int) -> Path:
    """Polyline of tree nodes from the root to ``target``."""
    nodes = tree.path_nodes(target)
    pts = tree.positions[nodes]
    return Path(pts, length=float(tree.dist[target]))


class IntervalList:
    """Ownership of the nodes of one target edge by the settled nodes of one
    source group (an edge interior, or a lone vertex) across a common face.

    A target node belongs to the settled source node offering the smallest
    ``dist(owner) + |owner w|`` over a feasible link; maximal runs with the
    same owner are the intervals.  Only the cheapest unsettled node of each
    owner is kept in the priority queue.
    """

    def __init__(self, ids, positions, heights):
        self.ids = ids
        self.positions = positions
        self.heights = heights
        self.offer = np.full(len(ids), np.inf)
        self.owner = np.full(len(ids), -1, dtype=np.int64)
        self._ascending = bool(heights[0] <= heights[-1])

    def _feasible(self, h):
        """Index range of nodes not above ``h``; heights along an edge are
        monotone, so this is a binary search."""
        if self._ascending:
            return 0, int(np.searchsorted(self.heights, h, side="right"))
        return int(np.searchsorted(-self.heights, -h, side="left")), len(self.ids)

    def claim(self, u, du, pu, hu, settled) -> bool:
        lo, hi = self._feasible(hu)
        if lo >= hi:
            return False
        sl = slice(lo, hi)
        cand = du + np.linalg.norm(self.positions[sl] - pu, axis=1)
        win = (cand < self.offer[sl]) & ~settled[self.ids[sl]]
        if not win.any():
            return False
        idx = np.flatnonzero(win) + lo
        self.offer[idx] = cand[win]
        self.owner[idx] = u
        return True

    def owns(self, u, w_pos) -> bool:
        return self.owner[w_pos] == u

    def head(self, u, settled):
        """Cheapest unsettled node owned by ``u`` as ``(offer, node, position)``."""
        mine = np.flatnonzero((self.owner == u) & ~settled[self.ids])
        if len(mine) == 0:
            return None
        k = mine[np.argmin(self.offer[mine])]
        return float(self.offer[k]), int(self.ids[k]), int(k)

    def intervals(self, settled) -> list:
        """``(owner, first, last)`` position runs over the unsettled nodes."""
        out = []
        live = (self.owner >= 0) & ~settled[self.ids]
        k = 0
        m = len(self.ids)
        while k < m:
            if not live[k]:
                k += 1
                continue
            j = k
            while j + 1 < m and live[j + 1] and self.owner[j + 1] == self.owner[k]:
                j += 1
            out.append((int(self.owner[k]), k, j))
            k = j + 1
        return out


def _target_lists(g: DescendGraph):
    """IntervalLists keyed by ``(face, role)``; see :class:`FaceBlock` roles."""
    t, d = g.terrain, g.disc
    lists = {}
    for f in range(t.n_faces):
        verts = t.triangles[f]
        fe = t.face_edges[f]
        for k in range(3):
            seq = d.edge_nodes(fe[k])
            lists[(f, k)] = [seq]
            # interior of e_k cannot link to its own endpoints v_{k+1}, v_{k+2}
            a = d.edge_nodes(fe[(k + 1) % 3])
            b = d.edge_nodes(fe[(k + 2) % 3])
            lists[(f, 3 + k)] = [a[a != verts[(k + 2) % 3]], b[b != verts[(k + 1) % 3]]]
    out = {}
    for key, seqs in lists.items():
        out[key] = [IntervalList(s, g.positions[s], g.heights[s]) for s in seqs]
    return out


_CHORD = (-1, -1)


def bushwhack(g: DescendGraph, source: int, return_lists: bool = False):
    """Interval-pruned Dijkstra; yields the same distances as :func:`dijkstra`.

    Each settled node claims, on every edge across each of its faces, the
    nodes for which it is now the cheapest predecessor among settled nodes of
    its own edge.  Only the nearest node of each claim enters the queue; the
    next one is queued when it is consumed.
    """
    source = g.disc.check_id(source)
    N = g.n_nodes
    dist = np.full(N, np.inf)
    parent = np.full(N, -1, dtype=np.int64)
    settled = np.zeros(N, dtype=bool)
    order = []
    lists = _target_lists(g)
    heap = []
    positions, heights = g.positions, g.heights

    def push_head(lst_key, j, u):
        hd = lists[lst_key][j].head(u, settled)
        if hd is not None:
            heapq.heappush(heap, (hd[0], hd[1], lst_key, j, u, hd[2]))

    def settle(u, du, via):
        settled[u] = True
        dist[u] = du
        parent[u] = via
        order.append(u)
        pu, hu = positions[u], heights[u]
        for f, role in g.roles(u):
            for j, lst in enumerate(lists[(f, role)]):
                if lst.claim(u, du, pu, hu, settled):
                    push_head((f, role), j, u)
        if g.edge_chords:
            for v in g.chord_neighbors(u):
                if not settled[v]:
                    nd = du + float(np.linalg.norm(positions[v] - pu))
                    heapq.heappush(heap, (nd, v, _CHORD, -1, u, -1))

    settle(source, 0.0, -1)
    while heap:
        key, w, lst_key, j, u, pos = heapq.heappop(heap)
        if lst_key == _CHORD:
            if not settled[w]:
                settle(w, key, u)
            continue
        lst = lists[lst_key][j]
        if not settled[w] and lst.owns(u, pos):
            settle(w, key, u)
        # the owner's queue entry was consumed (or went stale): queue its next
        push_head(lst_key, j, u)
    tree = _freeze(source, dist, parent, np.array(order, dtype=np.int64), positions)
    if return_lists:
        return tree, lists
    return tree
