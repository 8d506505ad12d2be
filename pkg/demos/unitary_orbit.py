"""
Sampling a C-numerical range
============================

Haar samples of tr(C U* A U), the exact boundary for Hermitian C, and the
default star center.
"""

import os

import numpy as np

from cnumrange import boundary_trace, classify_range, sample_range, star_center_default, support_membership
from cnumrange.geom2d import Region2, region_to_svg

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

rng = np.random.default_rng(1)
C = np.diag([2.0, 0.5, -1.0])
A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))

# 20000 unitary orbit samples
cloud = sample_range(C, A, 20000, seed=0)
print("samples:", cloud.count, "diameter: %.4f" % cloud.diameter)

# C is Hermitian, so the range is convex and its support function is exact
curve = boundary_trace(C, A, 720)
print("inscription error of the 720-gon: %.2e" % curve.inscription_error())

# every sample sits inside the exact support envelope
viol = support_membership(C, A, cloud.points[:2000])
print("largest support violation over 2000 samples: %.2e" % viol.max())

mu = star_center_default(C, A)
print("star center (tr C)(tr A)/n:", np.round(mu, 6))
print("class:", classify_range(C, A).kind)

path = os.path.join(OUT, "unitary_orbit.svg")
with open(path, "w") as fh:
    fh.write(region_to_svg(Region2([curve.polygon()]), points=cloud.points[:1500], kernel=[mu]))
print("wrote", path)
