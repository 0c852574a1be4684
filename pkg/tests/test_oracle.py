import math

import numpy as np
import pytest

from sdpath.discretizer import discretize
from sdpath.errors import FacesNotAdjacentError, MalformedPathError
from sdpath.generators import random_terrain, ramp, strip, two_face
from sdpath.geometry import Path
from sdpath.oracle import (
    euclid_lower_bound,
    refine_study,
    sample_descending_paths,
    snap_path,
    two_face_exact,
    verify_descending,
)

A, B, C, D = [0, 0, 1], [1, 0, 1], [0, 1, 0], [1, 1, 0]
MID_BC = [0.5, 0.5, 0.5]


def test_verify_examples():
    t = ramp()
    assert verify_descending(t, Path([A, MID_BC, D])).ok
    r = verify_descending(t, Path([C, A]))
    assert not r.ok and r.segment == 0 and "ascends" in r.violation
    s = strip()
    r = verify_descending(s, Path([s.vertices[0], s.vertices[4]]))
    assert not r.ok and "face" in r.violation


def test_verify_height_slack():
    t = ramp()
    assert verify_descending(t, Path([[0.5, 0.5, 0.5], [0.3, 0.5 - 1e-10, 0.5 + 1e-10]])).ok
    assert not verify_descending(t, Path([[0.5, 0.5, 0.5], [0.3, 0.49, 0.51]])).ok


def test_snap_fixed_point():
    t = ramp()
    d = discretize(t, 1.0)
    bc = d.steiner_ids(t.edge_id(1, 2))
    p = Path([A, d.positions[bc[10]], D])
    r = snap_path(t, d, p)
    assert np.all(r.displacement == 0) and r.excess == pytest.approx(0, abs=1e-15)


def test_snap_ramp_midpoint():
    t = ramp()
    d = discretize(t, 1.0)
    r = snap_path(t, d, Path([A, MID_BC, D]))
    node = r.nodes[1]
    assert d.node_edge[node] == t.edge_id(1, 2)
    assert d.heights[node] >= 0.5
    assert 0 < r.displacement[1] <= d.delta * d.params.sec_theta + 1e-12
    assert r.displacement[0] == 0 and r.displacement[-1] == 0
    assert verify_descending(t, r.snapped).ok


def test_snap_malformed():
    t = ramp()
    d = discretize(t, 1.0)
    with pytest.raises(MalformedPathError):
        snap_path(t, d, Path([A, [1 / 3, 1 / 3, 2 / 3], D]))


def test_snap_sampled_paths():
    t = random_terrain(3)
    eps = 0.5
    d = discretize(t, eps)
    aux = discretize(t, eps / 16)
    rng = np.random.default_rng(0)
    paths = sample_descending_paths(t, aux, t.source, rng, 30)
    assert len(paths) == 30
    bound = d.delta * d.params.sec_theta
    for p in paths:
        assert verify_descending(t, p).ok
        r = snap_path(t, d, p)
        k = len(p) - 2
        assert verify_descending(t, r.snapped).ok
        assert np.all(r.displacement <= bound + 1e-12)
        assert r.excess < 2 * k * bound
        assert r.excess <= 2 * r.displacement.sum() + 1e-12


def test_euclid_lower_bound():
    assert euclid_lower_bound(A, D) == pytest.approx(math.sqrt(3))
    assert euclid_lower_bound(A, A) == 0
    assert euclid_lower_bound(A, C) == pytest.approx(math.sqrt(2))


def test_two_face_ramp():
    t = ramp()
    p = two_face_exact(t, A, D, t.edge_id(1, 2))
    assert np.allclose(p.points[1], MID_BC, atol=1e-12)
    assert p.length == pytest.approx(math.sqrt(3), rel=1e-12)


def test_two_face_same_face_and_ascending():
    t = ramp()
    bc = t.edge_id(1, 2)
    p = two_face_exact(t, A, [0.2, 0.3, 0.7], bc)
    assert len(p) == 2
    assert two_face_exact(t, C, B, bc) is None


def test_two_face_not_adjacent():
    t = strip()
    with pytest.raises(FacesNotAdjacentError):
        two_face_exact(t, t.vertices[0], t.vertices[5], t.edge_id(2, 1))


def test_two_face_random_is_geodesic():
    # with a flat unfolding, the oracle path must be at most any other
    # two-segment route through the shared edge
    for seed in range(5):
        t = two_face(seed)
        e = t.edge_id(1, 2)
        v = np.array([0.2, 0.3, 0.5]) @ t.vertices[[1, 2, 3]]
        p = two_face_exact(t, t.vertices[0], v, e)
        if p is None:
            continue
        b, c = t.vertices[1], t.vertices[2]
        for lam in np.linspace(0, 1, 101):
            q = b + lam * (c - b)
            alt = np.linalg.norm(q - t.vertices[0]) + np.linalg.norm(v - q)
            assert p.length <= alt + 1e-12


def test_refine_study_ramp():
    table = refine_study(ramp(), 0, [D], [1.0, 0.5, 0.1])
    assert table.ok
    assert all(x >= math.sqrt(3) - 1e-9 for x in table.lengths(0))


def test_refine_study_same_face():
    v = [0.2, 0.3, 0.7]
    table = refine_study(ramp(), 0, [v], [1.0, 0.5])
    want = euclid_lower_bound(A, v)
    assert all(x == pytest.approx(want, rel=1e-12) for x in table.lengths(0))


def test_refine_study_random_terrain():
    t = random_terrain(8)
    rng = np.random.default_rng(8)
    V, T = t.vertices, t.triangles
    targets = [rng.dirichlet([1, 1, 1]) @ V[T[rng.integers(t.n_faces)]] for _ in range(10)]
    assert refine_study(t, t.source, targets, [1.0, 0.5, 0.25]).ok


def test_refine_study_rejects_bad_sequence():
    with pytest.raises(ValueError):
        refine_study(ramp(), 0, [D], [0.5, 1.0])
