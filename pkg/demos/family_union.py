"""
A union of convex ranges that is star-shaped but not convex
===========================================================

The segment family t A + (1 - t)(-A) with A = diag(1+i, 1-i) and C = E11.
Its slices sweep out two triangles that meet at the origin.
"""

import os

import numpy as np

from cnumrange import MatrixFamily, SimplexGrid, family_slices
from cnumrange.geom2d import Region2, certify_convex, certify_star_center, kernel_estimate, region_hausdorff, region_to_svg

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

C = np.diag([1.0, 0.0])
A = np.diag([1 + 1j, 1 - 1j])

S = family_slices(C, MatrixFamily([A, -A]), SimplexGrid(2, 200), 360)
R = S.region()
print("slices:", len(S), "grid-gap tolerance: %.3g" % S.membership_tol)

# compare with conv{0, 1+i, 1-i} u conv{0, -1-i, -1+i}
ref = Region2([[0, 1 + 1j, 1 - 1j], [0, -1 - 1j, -1 + 1j]])
print("hausdorff to the two triangles: %.4f" % region_hausdorff(R, ref))

# a chord of the union that leaves it
convex, witness = certify_convex(R, tol=S.membership_tol)
print("convex:", convex, " witness outside the union:", np.round(witness, 4))

# the origin sees every boundary point
print("0 is a star center:", certify_star_center(R, 0.0, tol=S.membership_tol).valid)
bad = certify_star_center(R, 0.5, tol=S.membership_tol, first_only=True)
print("0.5 is a star center:", bad.valid, " first blocked ray toward", np.round(bad.violations[0][0], 3))

K = kernel_estimate(R, 41, tol=S.membership_tol)
print("kernel grid points:", len(K))

path = os.path.join(OUT, "family_union.svg")
with open(path, "w") as fh:
    fh.write(region_to_svg(R, kernel=K))
print("wrote", path)
