"""Implicit directed graph of non-ascending links between nodes of a face.

A link ``x -> y`` exists iff ``x`` and ``y`` lie on the boundary of a common
face, ``h(x) >= h(y)``, and they are not two points of one terrain edge
unless both are terrain vertices.  Links are enumerated on demand; the link
set itself is never stored.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discretizer import Discretization
from .serialize import dumps

MAX_DUMP_NODES = 500


@dataclass(frozen=True)
class FaceBlock:
    """Boundary nodes of one face, laid out as
    ``[v0, v1, v2, interior(e0), interior(e1), interior(e2)]`` where ``e_k``
    is the edge opposite ``v_k``."""

    ids: np.ndarray
    positions: np.ndarray
    heights: np.ndarray
    # allowed[r] masks link targets for a source in role r: 0-2 = vertex
    # slot, 3-5 = interior of edge e_{r-3}
    allowed: np.ndarray
    slices: tuple


class DescendGraph:
    def __init__(self, disc: Discretization, edge_chords: bool = False):
        self.disc = disc
        self.terrain = disc.terrain
        self.edge_chords = edge_chords
        self.positions = disc.positions
        self.heights = disc.heights
        self.faces = [self._face_block(f) for f in range(self.terrain.n_faces)]
        self._roles = self._build_roles()
        self._flat = None

    @property
    def n_nodes(self) -> int:
        return self.disc.n_nodes

    def _face_block(self, f):
        t, d = self.terrain, self.disc
        verts = t.triangles[f]
        interiors = [d.steiner_ids(e) for e in t.face_edges[f]]
        ids = np.concatenate([verts] + interiors).astype(np.int64)
        bounds = np.cumsum([3] + [len(x) for x in interiors])
        slices = tuple(slice(bounds[k], bounds[k + 1]) for k in range(3))
        allowed = np.ones((6, len(ids)), dtype=bool)
        for k in range(3):
            # vertex v_k lies on edges e_{k+1} and e_{k+2}
            allowed[k, k] = False
            allowed[k, slices[(k + 1) % 3]] = False
            allowed[k, slices[(k + 2) % 3]] = False
            # interior of e_k shares it with v_{k+1} and v_{k+2}
            allowed[3 + k, slices[k]] = False
            allowed[3 + k, (k + 1) % 3] = False
            allowed[3 + k, (k + 2) % 3] = False
        allowed.setflags(write=False)
        return FaceBlock(ids, d.positions[ids], d.heights[ids], allowed, slices)

    def _build_roles(self):
        """For every node, the (face, role) pairs it takes part in."""
        t, d = self.terrain, self.disc
        roles = [None] * d.n_nodes
        for v in range(t.n):
            roles[v] = tuple((f, int(np.flatnonzero(t.triangles[f] == v)[0])) for f in t.vertex_faces[v])
        edge_roles = []
        for e in range(t.n_edges):
            edge_roles.append(tuple((f, 3 + int(np.flatnonzero(t.face_edges[f] == e)[0])) for f in t.edge_faces[e]))
        for node in range(t.n, d.n_nodes):
            roles[node] = edge_roles[d.node_edge[node]]
        return roles

    @property
    def flat(self) -> dict:
        """CSR-style arrays consumed by the compiled search kernels."""
        if self._flat is None:
            blocks = self.faces
            # within each face, entries run from highest to lowest so the
            # targets a node may descend to form a suffix of the block
            orders = [np.argsort(-b.heights, kind="stable") for b in blocks]
            face_ptr = np.cumsum([0] + [len(b.ids) for b in blocks]).astype(np.int64)
            role_ptr = np.cumsum([0] + [len(r) for r in self._roles]).astype(np.int64)
            role_face = np.array([f for r in self._roles for f, _ in r], dtype=np.int64)
            role_kind = np.array([k for r in self._roles for _, k in r], dtype=np.int64)
            chords = [self.chord_neighbors(x) if self.edge_chords else [] for x in range(self.n_nodes)]
            chord_ptr = np.cumsum([0] + [len(c) for c in chords]).astype(np.int64)
            chord_ids = np.array([y for c in chords for y in c], dtype=np.int64)
            self._flat = dict(
                positions=np.ascontiguousarray(self.positions),
                heights=np.ascontiguousarray(self.heights),
                face_ptr=face_ptr,
                face_ids=np.concatenate([b.ids[o] for b, o in zip(blocks, orders)]),
                face_pos=np.ascontiguousarray(np.vstack([b.positions[o] for b, o in zip(blocks, orders)])),
                face_h=np.concatenate([b.heights[o] for b, o in zip(blocks, orders)]),
                face_allowed=np.ascontiguousarray(
                    np.hstack([b.allowed[:, o] for b, o in zip(blocks, orders)]).T),
                role_ptr=role_ptr,
                role_face=role_face,
                role_kind=role_kind,
                chord_ptr=chord_ptr,
                chord_ids=chord_ids,
            )
        return self._flat

    def roles(self, node: int) -> tuple:
        return self._roles[node]

    def link_exists(self, x: int, y: int) -> bool:
        d = self.disc
        x, y = d.check_id(x), d.check_id(y)
        if x == y or self.heights[x] < self.heights[y]:
            return False
        if not set(d.node_faces(x)) & set(d.node_faces(y)):
            return False
        both_vertices = d.is_vertex(x) and d.is_vertex(y)
        if set(d.node_edges(x)) & set(d.node_edges(y)) and not both_vertices:
            return self.edge_chords and self._is_chord(x, y)
        return True

    def _is_chord(self, x, y):
        d = self.disc
        shared = set(d.node_edges(x)) & set(d.node_edges(y))
        for e in shared:
            seq = d.edge_nodes(e).tolist()
            i, j = seq.index(x), seq.index(y)
            if abs(i - j) == 1:
                return True
        return False

    def chord_neighbors(self, x: int) -> list:
        """Consecutive same-edge nodes reachable from ``x`` when chords are on."""
        d = self.disc
        out = []
        for e in d.node_edges(x):
            seq = d.edge_nodes(e)
            if len(seq) == 2:
                continue  # bare edge: already a vertex-vertex link
            k = int(np.flatnonzero(seq == x)[0])
            for j in (k - 1, k + 1):
                if 0 <= j < len(seq) and self.heights[seq[j]] <= self.heights[x]:
                    out.append(int(seq[j]))
        return out

    def out_neighbors(self, x: int) -> list:
        """``(y, |xy|)`` for every link out of ``x``, ordered by face id then
        node id; a node reachable through two faces is listed once."""
        x = self.disc.check_id(x)
        hx = self.heights[x]
        px = self.positions[x]
        seen = set()
        out = []
        for f, role in sorted(self._roles[x]):
            blk = self.faces[f]
            mask = blk.allowed[role] & (blk.heights <= hx)
            ids = blk.ids[mask]
            order = np.argsort(ids, kind="stable")
            ids = ids[order]
            w = np.linalg.norm(blk.positions[mask][order] - px, axis=1)
            for y, wy in zip(ids.tolist(), w.tolist()):
                if y not in seen:
                    seen.add(y)
                    out.append((y, wy))
        if self.edge_chords:
            for y in self.chord_neighbors(x):
                if y not in seen:
                    seen.add(y)
                    out.append((y, float(np.linalg.norm(self.positions[y] - px))))
        return out

    def out_degree_bound(self) -> int:
        return int(sum(len(b.ids) ** 2 for b in self.faces))

    def materialize(self) -> list:
        """All links as ``(x, y, weight)``; debugging aid for small graphs."""
        if self.n_nodes > MAX_DUMP_NODES:
            raise ValueError(f"refusing to materialise more than {MAX_DUMP_NODES} nodes")
        return [(x, y, w) for x in range(self.n_nodes) for y, w in self.out_neighbors(x)]

    def to_dot(self) -> str:
        lines = ["digraph descend {"]
        for x, y, w in self.materialize():
            lines.append(f'  {x} -> {y} [label="{w:.6g}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        links = self.materialize()
        return dumps({
            "nodes": [{"id": i, "position": self.positions[i].tolist()} for i in range(self.n_nodes)],
            "links": [{"from": x, "to": y, "weight": w} for x, y, w in links],
        })
