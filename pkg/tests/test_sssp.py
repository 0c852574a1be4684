import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sdpath.discretizer import discretize, place_steiner
from sdpath.errors import NoDescendingPathError, UnknownNodeError
from sdpath.generators import horizontal_triangle, nearlevel, random_terrain, ramp, skinny
from sdpath.graph import DescendGraph
from sdpath.oracle import verify_descending
from sdpath.sssp import bushwhack, dijkstra, extract_path
from sdpath.terrain import Terrain


def same_dist(a, b, rtol=1e-9):
    both_inf = np.isinf(a) & np.isinf(b)
    if not np.array_equal(np.isinf(a), np.isinf(b)):
        return False
    fin = ~both_inf
    return np.allclose(a[fin], b[fin], rtol=rtol, atol=0)


def test_horizontal_triangle():
    g = DescendGraph(place_steiner(horizontal_triangle(), 10.0))
    tree = dijkstra(g, 0)
    assert tree.dist[1] == pytest.approx(1.0) and tree.dist[2] == pytest.approx(1.0)
    assert tree.parent[1] == 0 and tree.parent[2] == 0 and tree.parent[0] == -1


def test_ramp_a_to_d():
    g = DescendGraph(discretize(ramp(), 0.1))
    tree = dijkstra(g, 0)
    assert math.sqrt(3) <= tree.dist[3] <= 1.1 * math.sqrt(3)


def test_isolated_minimum():
    # a pit: the centre is strictly lower than all of its neighbours
    V = [[0, 0, 0], [1, 0, 1], [0, 1, 1.2], [-1, 0, 1.4], [0, -1, 1.6]]
    F = [[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 1]]
    g = DescendGraph(discretize(Terrain(V, F), 1.0))
    tree = dijkstra(g, 0)
    assert tree.dist[0] == 0
    assert np.all(np.isinf(np.delete(tree.dist, 0)))
    assert np.all(np.delete(tree.parent, 0) == -1)


def test_unknown_source():
    g = DescendGraph(discretize(ramp(), 1.0))
    with pytest.raises(UnknownNodeError):
        dijkstra(g, g.n_nodes)
    with pytest.raises(UnknownNodeError):
        bushwhack(g, -1)


def test_extract_path():
    g = DescendGraph(discretize(ramp(), 0.5))
    tree = dijkstra(g, 0)
    root = extract_path(tree, 0)
    assert len(root) == 1 and root.length == 0
    p = extract_path(tree, 3)
    assert np.all(np.diff(p.heights) <= 0)
    assert p.length == pytest.approx(tree.dist[3], rel=1e-12)
    assert verify_descending(g.terrain, p).ok
    tree_c = dijkstra(g, 2)
    with pytest.raises(NoDescendingPathError):
        extract_path(tree_c, 0)


def _check_tree(g, tree):
    dist, parent = tree.dist, tree.parent
    assert dist[tree.root] == 0
    for u in np.flatnonzero(np.isfinite(dist)):
        if u == tree.root:
            continue
        p = parent[u]
        assert g.heights[p] >= g.heights[u]
        assert dist[u] == pytest.approx(dist[p] + np.linalg.norm(g.positions[u] - g.positions[p]), rel=1e-12)
        assert g.link_exists(int(p), int(u))
    # Bellman condition: no single link improves any distance
    for x in np.flatnonzero(np.isfinite(dist))[::5]:
        for y, w in g.out_neighbors(int(x)):
            assert dist[y] <= dist[x] + w + 1e-12 * max(1.0, dist[x])
    settled = dist[tree.order]
    assert np.all(np.diff(settled) >= 0)


@pytest.mark.parametrize("t", [ramp(), random_terrain(0), skinny(3), nearlevel(0.3)],
                         ids=["ramp", "random", "skinny", "nearlevel"])
def test_tree_invariants(t):
    g = DescendGraph(discretize(t, 1.0))
    src = int(np.argmax(t.heights))
    _check_tree(g, dijkstra(g, src))
    _check_tree(g, bushwhack(g, src))


def test_subpath_prefix():
    g = DescendGraph(discretize(random_terrain(4), 0.5))
    tree = dijkstra(g, g.terrain.source)
    reach = np.flatnonzero(np.isfinite(tree.dist))
    v = int(reach[np.argmax(tree.dist[reach])])
    seq = tree.path_nodes(v)
    for k, u in enumerate(seq):
        assert tree.path_nodes(u) == seq[: k + 1]


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 500), eps=st.sampled_from([1.0, 0.7]), chords=st.booleans())
def test_bushwhack_matches_dijkstra(seed, eps, chords):
    t = random_terrain(seed)
    g = DescendGraph(discretize(t, eps), edge_chords=chords)
    src = t.source
    assert same_dist(dijkstra(g, src).dist, bushwhack(g, src).dist)


@pytest.mark.parametrize("t", [ramp(), horizontal_triangle(), skinny(5), nearlevel(0.2)],
                         ids=["ramp", "flat", "skinny", "nearlevel"])
def test_bushwhack_matches_dijkstra_families(t):
    g = DescendGraph(discretize(t, 0.5))
    for src in range(t.n):
        a, b = dijkstra(g, src), bushwhack(g, src)
        assert same_dist(a.dist, b.dist)


def test_bushwhack_ramp_exact():
    g = DescendGraph(discretize(ramp(), 0.1))
    assert dijkstra(g, 0).dist[3] == bushwhack(g, 0).dist[3]


def test_interval_lists_are_runs_of_unsettled_nodes():
    g = DescendGraph(discretize(ramp(), 0.5))
    tree, lists = bushwhack(g, 0, return_lists=True)
    settled = np.zeros(g.n_nodes, dtype=bool)
    settled[tree.order] = True
    for group in lists.values():
        for lst in group:
            runs = lst.intervals(settled)
            covered = set()
            for owner, a, b in runs:
                assert a <= b and owner >= 0
                span = set(range(a, b + 1))
                assert not span & covered
                covered |= span
            for k in covered:
                assert not settled[lst.ids[k]]


def test_dist_invariant_under_vertex_permutation():
    t = random_terrain(11)
    perm = np.random.default_rng(0).permutation(t.n)
    inv = np.argsort(perm)
    t2 = Terrain(t.vertices[perm], inv[t.triangles])
    g1 = DescendGraph(discretize(t, 0.5))
    g2 = DescendGraph(discretize(t2, 0.5))
    d1 = dijkstra(g1, t.source).dist[: t.n]
    d2 = dijkstra(g2, int(inv[t.source])).dist[: t.n]
    assert same_dist(d1, d2[inv])
