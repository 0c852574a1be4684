# Interval-pruned search versus plain Dijkstra.
#
# Bushwhack keeps, for every face and pair of edges, which settled node is
# currently the best predecessor for each node of the far edge, and only
# queues the nearest of those.  It settles the same distances.

import time

import numpy as np

from sdpath import DescendGraph, bushwhack, dijkstra, generators
from sdpath.discretizer import discretize

for name, t in [("ramp", generators.ramp()), ("random", generators.random_terrain(1)),
                ("nearlevel", generators.nearlevel(0.2))]:
    g = DescendGraph(discretize(t, 0.5))
    src = t.source
    dijkstra(g, src)  # warm the compiled kernel
    t0 = time.perf_counter()
    a = dijkstra(g, src)
    t1 = time.perf_counter()
    b, lists = bushwhack(g, src, return_lists=True)
    t2 = time.perf_counter()
    fin = np.isfinite(a.dist)
    same = np.array_equal(fin, np.isfinite(b.dist)) and np.allclose(a.dist[fin], b.dist[fin], rtol=1e-9)
    print(f"{name:>10}: {g.n_nodes:6d} nodes, {sum(len(v) for v in lists.values()):3d} interval lists, "
          f"dijkstra {t1 - t0:.3f}s, bushwhack {t2 - t1:.3f}s, same distances: {same}")
