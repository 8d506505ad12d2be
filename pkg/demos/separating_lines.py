"""
Separating support lines and the star center they produce
=========================================================

For disjoint convex ranges W_C(A) and W_C(B), the two inner common support
lines cross at a point that sees the whole union of the segment family.
"""

import numpy as np

from cnumrange import MatrixFamily, SimplexGrid, boundary_trace, family_slices
from cnumrange.geom2d import certify_star_center, separating_support_lines

C = np.diag([1.0, 0.0])
A = np.array([[1 + 1j, 0.3], [0, 2 + 1j]])
B = np.array([[-2 - 1j, 0], [0.2j, -1 - 1j]])

PA = boundary_trace(C, A, 720).polygon()
PB = boundary_trace(C, B, 720).polygon()
L1, L2, mu = separating_support_lines(PA, PB)
print("crossing point of the separating lines:", np.round(mu, 6))
for L in (L1, L2):
    a = L.value(PA.vertices) - L.offset
    b = L.value(PB.vertices) - L.offset
    print("  line: max over W(A) %.2e  min over W(B) %.2e" % (a.max(), b.min()))

S = family_slices(C, MatrixFamily([A, B]), SimplexGrid(2, 100), 360)
cert = certify_star_center(S.region(), mu, tol=S.membership_tol)
print("star center of the union:", cert.valid, " rays checked:", cert.checked_rays)
