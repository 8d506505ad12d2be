"""
Product numerical ranges of direct sums
=======================================

Product vectors u (x) v on A_1 (+) ... (+) A_m give points sum |u_i|^2 v* A_i v,
the same set as the slice union of the family conv{A_i}.
"""

import numpy as np

from cnumrange import MatrixFamily, SimplexGrid, direct_sum, family_slices, product_numerical_range
from cnumrange.geom2d import cloud_region_hausdorff

rng = np.random.default_rng(3)
gens = []
for _ in range(2):
    G = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    gens.append(G / np.linalg.norm(G, 2))

cloud = product_numerical_range(direct_sum(*gens), 2, 2, 50000, seed=0)
C = np.diag([1.0, 0.0])
S = family_slices(C, MatrixFamily(gens), SimplexGrid(2, 200), 360)
h = cloud_region_hausdorff(S.region(), cloud.points)
print("product cloud vs slice union, Hausdorff %.4f (shrinks as samples grow)" % h)
for N in (5000, 20000, 50000):
    c = product_numerical_range(direct_sum(*gens), 2, 2, N, seed=1)
    print("  N=%6d  h=%.4f" % (N, cloud_region_hausdorff(S.region(), c.points)))
