"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line
(collected again in the terminal summary)."""

import math
import time

import numpy as np
import pytest

from sdpath.discretizer import discretize, place_uniform
from sdpath.errors import NoDescendingPathError
from sdpath.generators import nearlevel, random_terrain, ramp, skinny, strip, strip_isoline, two_face
from sdpath.graph import DescendGraph
from sdpath.oracle import (
    euclid_lower_bound,
    sample_descending_paths,
    snap_path,
    two_face_exact,
    verify_descending,
)
from sdpath.query import Solver, query
from sdpath.sssp import bushwhack, dijkstra

EPS_MAIN = 0.2          # accuracy used for the feasibility / equivalence runs
EPS_SNAP = 0.5          # accuracy checked by the snap construction
N_TARGETS = 50
N_RANDOM = 20
REFINE = (0.8, 0.4, 0.2)
ATOL = 1e-9


def suite_terrains():
    out = [("ramp", ramp()), ("skinny(10)", skinny(10)), ("nearlevel(0.05)", nearlevel(0.05))]
    out += [(f"random[{k}]", random_terrain(k)) for k in range(N_RANDOM)]
    return out


def random_targets(t, count, seed):
    rng = np.random.default_rng(seed)
    V, T = t.vertices, t.triangles
    faces = rng.integers(t.n_faces, size=count)
    return [rng.dirichlet([1.0, 1.0, 1.0]) @ V[T[f]] for f in faces]


def answer(sol, v):
    try:
        return sol.query(v)
    except NoDescendingPathError:
        return None


@pytest.fixture(scope="module")
def suite():
    """Criterion-1 runs: every terrain solved at EPS_MAIN and queried at 50
    random surface points; wall time covers solving, querying and checking."""
    runs = []
    t0 = time.perf_counter()
    for k, (name, t) in enumerate(suite_terrains()):
        sol = Solver(t, EPS_MAIN)
        targets = random_targets(t, N_TARGETS, seed=1000 + k)
        answers = [answer(sol, v) for v in targets]
        reports = [verify_descending(sol.terrain, a.path) if a else None for a in answers]
        runs.append(dict(name=name, terrain=t, solver=sol, targets=targets,
                         answers=answers, reports=reports))
    return runs, time.perf_counter() - t0


@pytest.fixture(scope="module")
def refinement(suite):
    """Lengths at each epsilon of REFINE and at epsilon / 8 for every target."""
    runs, _ = suite
    table = {}
    for run in runs:
        t = run["terrain"]
        lengths = {}
        for eps in REFINE + tuple(e / 8 for e in REFINE):
            sol = run["solver"] if eps == EPS_MAIN else Solver(t, eps)
            lengths[eps] = np.array([sol.length(v) for v in run["targets"]])
        table[run["name"]] = lengths
    return table


def test_criterion_01_feasibility(suite, criterion):
    runs, elapsed = suite
    answered = sum(a is not None for r in runs for a in r["answers"])
    bad = [(r["name"], i, str(rep)) for r in runs for i, rep in enumerate(r["reports"])
           if rep is not None and not rep.ok]
    ok = not bad and elapsed < 60
    detail = (f"{len(runs)} terrains x {N_TARGETS} targets, {answered} answered, "
              f"{len(bad)} non-descending, {elapsed:.1f}s (< 60s)")
    assert criterion(1, ok, detail), bad[:5]


def test_criterion_02_exact_oracle(criterion):
    t = ramp()
    sqrt3 = math.sqrt(3)
    oracle = two_face_exact(t, t.vertices[0], t.vertices[3], t.edge_id(1, 2))
    fails = []
    if oracle is None or abs(oracle.length - sqrt3) > ATOL:
        fails.append(("ramp oracle", None))
    for eps in (1.0, 0.5, 0.1, 0.05):
        length = Solver(t, eps, 0).query(t.vertices[3]).length
        if not sqrt3 - ATOL <= length <= (1 + eps) * sqrt3 + ATOL:
            fails.append(("ramp", eps, length))
    applicable, seed = 0, 0
    rng = np.random.default_rng(7)
    while applicable < 10 and seed < 500:
        tf = two_face(seed)
        seed += 1
        v = rng.dirichlet([1.0, 1.0, 1.0]) @ tf.vertices[[1, 3, 2]]
        exact = two_face_exact(tf, tf.vertices[0], v, tf.edge_id(1, 2))
        if exact is None:
            continue
        applicable += 1
        for eps in (1.0, 0.5, 0.1, 0.05):
            length = Solver(tf, eps, 0).length(v)
            if not exact.length - ATOL <= length <= (1 + eps) * exact.length + ATOL:
                fails.append((f"two_face({seed - 1})", eps, length, exact.length))
    ok = not fails and applicable == 10
    detail = f"ramp A->D at 4 epsilons + {applicable} two-face instances; {len(fails)} outside [L*, (1+eps)L*]"
    assert criterion(2, ok, detail), fails[:5]


def test_criterion_03_snap(criterion):
    n_paths, worst_disp, fails = 0, 0.0, []
    for k, (name, t) in enumerate(suite_terrains()):
        sol = Solver(t, EPS_SNAP)
        d = sol.disc
        aux = discretize(t, EPS_SNAP / 16)
        rng = np.random.default_rng(2000 + k)
        paths = sample_descending_paths(t, aux, t.source, rng, 100)
        if len(paths) < 100:
            fails.append((name, "only", len(paths), "paths sampled"))
        bound = d.delta * d.params.sec_theta
        for p in paths:
            n_paths += 1
            r = snap_path(t, d, p)
            rep = verify_descending(t, r.snapped)
            if not rep.ok:
                fails.append((name, "snapped path not descending", str(rep)))
            worst_disp = max(worst_disp, float(r.displacement.max() / bound))
            if np.any(r.displacement > bound + 1e-12):
                fails.append((name, "displacement", float(r.displacement.max()), bound))
            length = sol.length(p.points[-1])
            if not length <= r.snapped.length + ATOL:
                fails.append((name, "solver above snap", length, r.snapped.length))
    detail = (f"{n_paths} sampled paths over {len(suite_terrains())} terrains; worst displacement "
              f"{worst_disp:.3f} x delta*sec(theta); {len(fails)} violations")
    assert criterion(3, not fails, detail), fails[:5]


def test_criterion_04_node_bound(suite, refinement, criterion):
    runs, _ = suite
    cases = [(r["name"], r["terrain"], eps) for r in runs for eps in (EPS_MAIN,) + REFINE + tuple(e / 8 for e in REFINE)]
    cases += [("ramp", ramp(), eps) for eps in (1.0, 0.5, 0.1, 0.05)]
    cases += [(f"two_face({s})", two_face(s), eps) for s in range(10) for eps in (1.0, 0.5, 0.1, 0.05)]
    fails, worst = [], 0.0
    seen = set()
    for name, t, eps in cases:
        if (name, eps) in seen:
            continue
        seen.add((name, eps))
        d = discretize(t, eps)
        counts = d.edge_node_counts()
        worst = max(worst, counts.max() / d.c)
        if not np.all(counts < d.c) or not d.n_nodes <= 3 * t.n * d.c:
            fails.append((name, eps, int(counts.max()), d.c))
    detail = f"{len(seen)} terrain/epsilon pairs; max |V on e| / c = {worst:.3f}; {len(fails)} violations"
    assert criterion(4, not fails, detail), fails[:5]


def test_criterion_05_refinement(suite, refinement, criterion):
    runs, _ = suite
    fails, checked, worst = [], 0, 0.0
    for run in runs:
        lengths = refinement[run["name"]]
        for eps in REFINE:
            coarse, fine = lengths[eps], lengths[eps / 8]
            for i, (a, b) in enumerate(zip(coarse, fine)):
                if np.isinf(a) and np.isinf(b):
                    continue
                checked += 1
                if np.isfinite(a) and np.isfinite(b) and b > 0:
                    worst = max(worst, (a / b - 1) / eps)
                if not a <= (1 + eps) * b + ATOL:
                    fails.append((run["name"], eps, i, a, b))
    detail = (f"{checked} (target, epsilon) pairs; worst (len(eps)/len(eps/8) - 1)/eps = {worst:.4f}; "
              f"{len(fails)} violations")
    assert criterion(5, not fails, detail), fails[:5]


def test_criterion_06_bushwhack(suite, criterion):
    runs, _ = suite
    fails, worst = [], 0.0
    for run in runs:
        sol = run["solver"]
        a = sol.tree.dist
        b = bushwhack(sol.graph, sol.source).dist
        if not np.array_equal(np.isinf(a), np.isinf(b)):
            fails.append((run["name"], "reachability differs"))
            continue
        fin = np.isfinite(a) & (a > 0)
        rel = float(np.max(np.abs(a[fin] - b[fin]) / a[fin])) if fin.any() else 0.0
        worst = max(worst, rel)
        if rel > 1e-9:
            fails.append((run["name"], rel))
    detail = f"{len(runs)} terrains; max relative dist difference {worst:.2e} (<= 1e-9)"
    assert criterion(6, not fails, detail), fails[:5]


def test_criterion_07_lower_bound(suite, refinement, criterion):
    runs, _ = suite
    fails, checked = [], 0
    for run in runs:
        s = run["solver"].terrain.vertices[run["solver"].source]
        lower = np.array([euclid_lower_bound(s, v) for v in run["targets"]])
        for a, lb in zip(run["answers"], lower):
            if a is not None:
                checked += 1
                if a.length < lb - ATOL:
                    fails.append((run["name"], a.length, lb))
        for eps, lengths in refinement[run["name"]].items():
            ok = np.isinf(lengths) | (lengths >= lower - ATOL)
            checked += int(np.isfinite(lengths).sum())
            if not ok.all():
                fails.append((run["name"], eps, int((~ok).sum())))
    detail = f"{checked} answers checked against |sv|; {len(fails)} below the bound"
    assert criterion(7, not fails, detail), fails[:5]


def test_criterion_08_crossing_strip(criterion):
    t = strip()
    pts, v = strip_isoline(t)
    from sdpath.geometry import Path

    exact = Path(pts)
    fails, lines = [], []
    for eps in (1.0, 0.5, 0.1):
        sol = Solver(t, eps, 0)
        snapped = snap_path(t, sol.disc, exact).snapped
        try:
            ans = sol.query(v)
        except NoDescendingPathError:
            fails.append((eps, "no path"))
            continue
        if not verify_descending(t, ans.path).ok or not ans.length <= (1 + eps) * snapped.length + ATOL:
            fails.append((eps, ans.length, snapped.length))
        lines.append(f"eps={eps}: {ans.length:.6f} vs snap {snapped.length:.6f}")
    blind = place_uniform(t, 50)
    try:
        query(t, blind, dijkstra(DescendGraph(blind), 0), v)
        blind_found = True
    except NoDescendingPathError:
        blind_found = False
    detail = "; ".join(lines) + f"; height-blind placement finds a path: {blind_found}"
    assert criterion(8, not fails, detail), fails


def test_criterion_09_in_face_exact(suite, criterion):
    runs, _ = suite
    fails, checked = [], 0
    for run in runs:
        sol = run["solver"]
        t = sol.terrain
        s = t.vertices[sol.source]
        for f in t.vertex_faces[sol.source]:
            c = t.vertices[t.triangles[f]].mean(axis=0)
            want = float(np.linalg.norm(c - s))
            got = sol.query(c).length
            checked += 1
            if abs(got - want) > 1e-12 * want:
                fails.append((run["name"], f, got, want))
    detail = f"{checked} centroids of source faces; {len(fails)} differ from |s c| by > 1e-12 relative"
    assert criterion(9, not fails, detail), fails[:5]


def test_criterion_10_scaling(criterion):
    eps = np.array([1.0, 0.5, 0.25, 0.125])
    worst, fails = 0.0, []
    for name, t in [("ramp", ramp()), ("skinny(10)", skinny(10)), ("random[0]", random_terrain(0))]:
        counts = np.array([discretize(t, e).n_nodes for e in eps], dtype=float)
        M = np.column_stack([np.ones_like(eps), 1 / eps])
        coef, *_ = np.linalg.lstsq(M, counts, rcond=None)
        resid = float(np.max(np.abs(M @ coef - counts) / counts))
        worst = max(worst, resid)
        if resid >= 0.10:
            fails.append((name, counts.tolist(), resid))
    detail = f"|V| ~ a + b/eps over eps in {{1, 1/2, 1/4, 1/8}}; worst relative residual {worst:.2e} (< 10%)"
    assert criterion(10, not fails, detail), fails
