# Why Steiner points have to be placed by height.
#
# On this four-face strip the only descending route from s to v follows the
# contour z = 1: each edge it crosses dips below 1 at one end and rises above
# it at the other.  Steiner points spread evenly along the edges (a common
# choice for ordinary shortest paths) almost never land exactly on z = 1, so
# every route through them has to climb somewhere.  Slicing with the planes
# through the vertex heights places a node at z = 1 on every crossed edge.

import numpy as np

from sdpath import generators
from sdpath.discretizer import discretize, place_uniform
from sdpath.errors import NoDescendingPathError
from sdpath.geometry import Path
from sdpath.graph import DescendGraph
from sdpath.oracle import snap_path, verify_descending
from sdpath.query import query
from sdpath.sssp import dijkstra

t = generators.strip()
points, v = generators.strip_isoline(t)
exact = Path(points)
print("contour path:", exact.length, "descending:", verify_descending(t, exact).ok)

# %% Height-blind placement: no descending path at any density
for k in (5, 50, 500):
    d = place_uniform(t, k)
    tree = dijkstra(DescendGraph(d), 0)
    try:
        length = query(t, d, tree, v).length
        print(f"{k:4d} evenly spaced points per edge: found {length:.6f}")
    except NoDescendingPathError:
        print(f"{k:4d} evenly spaced points per edge: no descending path")

# %% Plane slicing: the contour itself is in the graph
for eps in (1.0, 0.5, 0.1):
    d = discretize(t, eps)
    tree = dijkstra(DescendGraph(d), 0)
    ans = query(t, d, tree, v)
    snapped = snap_path(t, d, exact).snapped
    print(f"eps={eps}: {d.n_nodes:5d} nodes, length {ans.length:.9f}, "
          f"snapped contour {snapped.length:.9f}")
    print("   heights along the answer:", np.unique(ans.path.heights).tolist())
