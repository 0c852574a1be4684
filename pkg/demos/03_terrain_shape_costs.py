# How terrain shape drives the node count.
#
# The per-edge node bound grows with X = (L/h) sec(theta): long thin faces
# raise L/h, and an almost level edge raises sec(theta).  Both families are
# generated at increasing severity and discretised at a fixed epsilon.

from sdpath import generators, geometry_params
from sdpath.discretizer import discretize

eps = 0.5
print(f"{'terrain':>18} {'L/h':>9} {'sec':>9} {'X':>10} {'|V|':>8} {'3nc':>10}")
for aspect in (2, 20, 200):
    t = generators.skinny(aspect)
    p = geometry_params(t)
    d = discretize(t, eps)
    print(f"{'skinny(' + str(aspect) + ')':>18} {p.L / p.h:9.2f} {p.sec_theta:9.2f} {p.X:10.1f} "
          f"{d.n_nodes:8d} {3 * t.n * d.c:10.0f}")

for tilt in (0.5, 0.1, 0.02):
    t = generators.nearlevel(tilt)
    p = geometry_params(t)
    d = discretize(t, eps)
    print(f"{'nearlevel(' + str(tilt) + ')':>18} {p.L / p.h:9.2f} {p.sec_theta:9.2f} {p.X:10.1f} "
          f"{d.n_nodes:8d} {3 * t.n * d.c:10.0f}")

# %% Node count against 1/epsilon on a fixed terrain
t = generators.random_terrain(0)
print("\nrandom terrain, n =", t.n)
for eps in (1, 0.5, 0.25, 0.125):
    print(f"  eps = {eps:<6} |V| = {discretize(t, eps).n_nodes}")
