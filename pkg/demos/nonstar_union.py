"""
A slice union with no star center on the imaginary axis
========================================================

C = diag(1, w, w^2) + I with w a cube root of unity, and a segment of
diagonal matrices.  Each slice is a rotated, scaled deltoid shifted by
(1 - 2t)/2.
"""

import numpy as np

from cnumrange import sample_range
from cnumrange.geom2d import StarPolygon, kernel_estimate
from cnumrange.repro import OMEGA, ex4_1_region, gamma_point, imaginary_axis_sweep

# two boundary points that every candidate must see
print("f(0,0) =", np.round(gamma_point(0, 0), 6), " f(0,1) =", np.round(gamma_point(0, 1), 6))

# W_C(C) for C = diag(1, w, w^2) is the filled deltoid 2e^{it} + e^{-2it}
cloud = sample_range(OMEGA, OMEGA, 50000, seed=0)
th = np.linspace(-np.pi, np.pi, 20000, endpoint=False)
deltoid = StarPolygon(0j, 2 * np.exp(1j * th) + np.exp(-2j * th))
print("largest signed distance of %d samples to the deltoid: %.2e"
      % (cloud.count, deltoid.signed_distance(cloud.points).max()))

R = ex4_1_region(t_grid=100)
cand, fa, fb, (lo, hi) = imaginary_axis_sweep(R, 100)
print("imaginary-axis candidates in the union: y in [%.3f, %.3f]" % (lo, hi))
print("blocked toward f(0,0):", int(fa.sum()), " blocked toward f(0,1):", int(fb.sum()),
      " blocked by neither:", int((~(fa | fb)).sum()))

K = kernel_estimate(ex4_1_region(t_grid=30), 40)
print("kernel grid points at resolution 40:", len(K))
