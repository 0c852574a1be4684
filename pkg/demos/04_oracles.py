# Checking the solver with independent oracles.
#
# 1. Random descending paths are drawn on a much finer set of nodes; moving
#    each bend up to the nearest coarse node on the same edge must keep the
#    path descending and must not beat the solver.
# 2. On two faces the exact answer is available by unfolding.
# 3. Answers at epsilon and at a finer epsilon stay within a factor 1 + epsilon.

import numpy as np

from sdpath import Solver, generators
from sdpath.discretizer import discretize
from sdpath.oracle import (
    refine_study,
    sample_descending_paths,
    snap_path,
    two_face_exact,
    verify_descending,
)

t = generators.random_terrain(3)
eps = 0.5
sol = Solver(t, eps)
d = sol.disc
fine = discretize(t, eps / 16)
paths = sample_descending_paths(t, fine, t.source, np.random.default_rng(0), 200)
bound = d.delta * d.params.sec_theta

worst, ok = 0.0, 0
for p in paths:
    r = snap_path(t, d, p)
    worst = max(worst, r.displacement.max() / bound)
    ok += verify_descending(t, r.snapped).ok and sol.length(p.points[-1]) <= r.snapped.length + 1e-9
print(f"{len(paths)} sampled paths: {ok} snapped descending and not shorter than the solver")
print(f"largest bend displacement: {worst:.3f} x delta sec(theta)")

# %% Exact two-face answers
for seed in range(5):
    tf = generators.two_face(seed)
    v = np.array([0.3, 0.4, 0.3]) @ tf.vertices[[1, 3, 2]]
    exact = two_face_exact(tf, tf.vertices[0], v, tf.edge_id(1, 2))
    if exact is None:
        print(f"two_face({seed}): unfolding does not give a descending path, no claim")
        continue
    got = Solver(tf, 0.1, 0).length(v)
    print(f"two_face({seed}): exact {exact.length:.6f}, solver {got:.6f}, ratio {got / exact.length:.6f}")

# %% Refinement
targets = [t.vertices[k] for k in range(t.n) if k != t.source]
table = refine_study(t, t.source, targets, [1.0, 0.5, 0.25, 0.125])
print("\nrefinement violations:", table.violations)
for i in range(len(targets)):
    print(f"  target {i}: " + "  ".join(f"{x:.6f}" for x in table.lengths(i)))
