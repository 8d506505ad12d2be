"""
Joint C-numerical ranges in three dimensions
============================================

The Pauli triple gives the unit sphere.  Two families of diagonal triples
give exact triangle slices: one union is star-shaped, the other is not.
"""

import numpy as np

from cnumrange import MatrixTuple, SimplexGrid, certify_star_center_kd, joint_family_slices, max_along_line, sample_joint
from cnumrange.repro import PAULI, at_generators, nonstar_slices

E11 = np.diag([1.0, 0.0])

cloud = sample_joint(E11, MatrixTuple(list(PAULI)), 20000, seed=0)
p = cloud.real_points
print("Pauli: max | |p|^2 - 1 | = %.2e" % np.abs((p ** 2).sum(1) - 1).max())
print("Pauli: nearest sample to the origin %.4f" % np.linalg.norm(p, axis=1).min())

# triangle family: every slice contains (1/2, 1/2, 1/2)
A0, A1 = at_generators()
slices = joint_family_slices(np.diag([1.0, 0, 0]), [A0, A1], SimplexGrid(2, 50))
half = np.full(3, 0.5)
print("triangle family: (1/2,1/2,1/2) star center:",
      certify_star_center_kd(slices, half, targets=256, steps=32).valid)
print("triangle family: origin star center:",
      certify_star_center_kd(slices, np.zeros(3), targets=np.array([[0.5, 0.5, 0.0]]), steps=32).valid)

# second family: the slice maxima along (alpha, 0, t) trace 1 - 2t + 2t^2
S = nonstar_slices(200)
for t in (0.0, 0.25, 0.5, 0.75, 1.0):
    sl = [s for s in S if abs(s.parameter[1] - t) < 1e-12]
    print("t=%.2f  max alpha=%.6f  1-2t+2t^2=%.6f" % (t, max_along_line(sl, [0, 0, t], [1, 0, 0]),
                                                       1 - 2 * t + 2 * t * t))
bad = certify_star_center_kd(S, np.array([0, 0, 0.5]), targets=np.array([[0, 0, 1.0]]), steps=100)
print("second family: (0,0,1/2) star center:", bad.valid)
