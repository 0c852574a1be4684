# Shortest descending paths on the smallest interesting terrain.
#
# The unit ramp is two triangles falling from the edge AB (z = 1) to the
# edge CD (z = 0).  We walk through every stage: parameters, Steiner
# placement, the descending graph, the shortest-path tree and queries.

import math

import numpy as np

from sdpath import Solver, generators, geometry_params, validate
from sdpath.discretizer import discretize

# %% The terrain and its shape parameters
t = generators.ramp()
print(t, "valid:", validate(t).ok)

p = geometry_params(t)
print(f"L = {p.L:.5f}  (longest edge, BC)")
print(f"h = {p.h:.5f}  (A to BC)")
print(f"theta = {p.theta:.5f} rad, sec(theta) = {p.sec_theta:.5f}")
print(f"X = (L/h) sec(theta) = {p.X:.5f}")

# %% Steiner points: one per horizontal plane z = j*delta, plus vertex heights
d = discretize(t, epsilon=1.0)
print(f"\ndelta = {d.delta:.7f}, nodes = {d.n_nodes}")
for e, (i, j) in enumerate(t.edges.tolist()):
    print(f"  edge {'ABCD'[i]}{'ABCD'[j]}: {len(d.steiner_ids(e))} Steiner points")

# %% Solve from A and query a few points
sol = Solver(t, epsilon=0.1, source=0)
exact = math.sqrt(3)  # the straight line through the middle of BC
for v in ([1, 1, 0], [1 / 3, 1 / 3, 2 / 3], [0.5, 0.5, 0.5], [0.9, 0.6, 0.4]):
    ans = sol.query(v)
    print(f"\nto {np.round(v, 3).tolist()}: length {ans.length:.6f} ({ans.terminal_kind}, "
          f"{len(ans.path)} points)")

ans = sol.query([1, 1, 0])
print(f"\nA -> D: {ans.length:.6f}, exact {exact:.6f}, ratio {ans.length / exact:.6f} (<= 1.1)")
