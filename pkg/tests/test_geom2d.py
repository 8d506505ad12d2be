import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cnumrange.geom2d import (
    Polygon,
    Region2,
    StarPolygon,
    certify_convex,
    certify_star_center,
    cloud_region_hausdorff,
    convex_hull,
    hausdorff,
    kernel_estimate,
    orient,
    region_contains,
    region_hausdorff,
    region_to_svg,
    segment_in_region,
    separating_support_lines,
)

EX31 = Region2([[0, 1 + 1j, 1 - 1j], [0, -1 - 1j, -1 + 1j]])
EX32 = Region2([[0, -1 + 1j, -1 - 1j], [0, 2, 1 - 1j, 1 + 1j], [2, 3 + 1j, 3 - 1j]])
SQUARE = Region2([[0, 1, 1 + 1j, 1j]])


def random_convex(rng, center, k=6, r=1.0):
    z = center + r * (rng.standard_normal(k) + 1j * rng.standard_normal(k))
    return convex_hull(z)


def test_orient_exact():
    assert orient(0, 1, 1j) == 1
    assert orient(0, 1j, 1) == -1
    assert orient(0, 1, 2) == 0
    # nearly collinear: the float determinant rounds, the exact fallback does not
    a, b = 0.1 + 0.1j, 0.3 + 0.3j
    c = 0.7 + 0.7j
    assert orient(a, b, c) == 0


def test_hull_examples():
    H = convex_hull([0, 1 + 1j, 1 - 1j])
    assert H.kind == "polygon"
    assert np.allclose(H.vertices, [0, 1 - 1j, 1 + 1j])
    S = convex_hull([0, 1, 2])
    assert S.kind == "segment" and np.allclose(sorted(S.vertices.real), [0, 2])
    assert convex_hull([1j, 1j]).kind == "point"


def test_hull_omega_permutations():
    w = np.exp(2j * np.pi / 3)
    pts = [0, 0, 0, 3, 3 * w, 3 * w**2]
    H = convex_hull(pts)
    assert len(H.vertices) == 3 and np.allclose(np.abs(H.vertices), 3)
    assert H.area == pytest.approx(27 * np.sqrt(3) / 4)


@given(st.integers(0, 2**32 - 1), st.integers(3, 400))
@settings(max_examples=50)
def test_hull_contains_inputs(seed, k):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    H = convex_hull(z)
    assert H.contains(z, 1e-12).all()
    v = H.vertices
    if len(v) >= 3:
        turns = [orient(v[i], v[(i + 1) % len(v)], v[(i + 2) % len(v)]) for i in range(len(v))]
        assert all(t == 1 for t in turns)


def test_region_contains_examples():
    assert region_contains(SQUARE, 0.5 + 0.5j)
    assert not region_contains(SQUARE, 2.0, 0.0)
    assert region_contains(EX31, 0.5 * (1 + 1j))
    assert not region_contains(EX31, 0.5 + 0.9j)
    assert region_contains(EX31, 2.0, tol=1 + 1e-9)


def test_segment_in_region_examples():
    rng = np.random.default_rng(0)
    P = random_convex(rng, 0)
    R = Region2([P])
    for _ in range(20):
        a, b = P.vertices[rng.integers(len(P))], P.vertices[rng.integers(len(P))]
        assert segment_in_region(R, a, b, 64, 1e-12)
    assert not segment_in_region(EX32, -1 + 1j, 3 + 1j)
    # the segment runs along shared edges, so only rounding separates it from the boundary
    assert segment_in_region(EX31, 1 + 1j, -1 - 1j, 64, 1e-12)


def test_star_certificates():
    assert certify_star_center(EX31, 0.0).valid
    cert = certify_star_center(EX32, 0.0)
    assert not cert.valid
    assert any(z.real > 2 for z, _ in cert.violations)
    poly = random_convex(np.random.default_rng(1), 0)
    assert certify_star_center(Region2([poly]), poly.vertices.mean()).valid


def test_kernel_examples():
    th = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    disk = Region2([np.exp(1j * th)])
    K = kernel_estimate(disk, 20)
    grid = np.linspace(-1, 1, 20)
    inside = (grid[:, None] + 1j * grid[None, :]).ravel()
    inside = inside[disk.contains(inside, 1e-9)]
    assert len(K) == len(inside)
    assert len(kernel_estimate(EX32, 100)) == 0
    K = kernel_estimate(EX31, 101)
    assert np.min(np.abs(K)) <= 1e-12


def test_convexity_examples():
    ok, w = certify_convex(SQUARE)
    assert ok and w is None
    ok, w = certify_convex(EX31)
    assert not ok
    assert not region_contains(EX31, w)
    assert abs(w.imag) > abs(w.real)
    # two collinear segments with overlapping hull
    R = Region2([[0, 2], [1, 3]])
    assert certify_convex(R)[0]


def test_separating_squares():
    P = convex_hull([1 + 1j, 2 + 1j, 2 + 2j, 1 + 2j])
    Q = convex_hull([-1 - 1j, -2 - 1j, -2 - 2j, -1 - 2j])
    L1, L2, mu = separating_support_lines(P, Q)
    assert abs(mu) <= 1e-9
    assert abs(mu.real - mu.imag) <= 1e-9


def test_separating_segments():
    P = convex_hull([1 + 1j, 2 + 1j])
    Q = convex_hull([-2 - 1j, -1 - 1j])
    L1, L2, mu = separating_support_lines(P, Q)
    # oracle: the two inner tangents are y = x and y = x / 2
    assert abs(mu) <= 1e-9
    slopes = sorted(-n.real / n.imag for n in (L1.normal, L2.normal))
    assert slopes == pytest.approx([0.5, 1.0], abs=1e-9)


def test_separating_collinear_error():
    with pytest.raises(ValueError):
        separating_support_lines(convex_hull([0, 1]), convex_hull([2, 3]))
    with pytest.raises(ValueError):
        separating_support_lines(convex_hull([0, 2, 2j]), convex_hull([0.1 + 0.1j, 3, 3j]))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=50)
def test_separating_inequalities(seed):
    rng = np.random.default_rng(seed)
    shift = 4 * np.exp(2j * np.pi * rng.random())
    P, Q = random_convex(rng, 0), random_convex(rng, shift)
    if P.kind != "polygon" or Q.kind != "polygon":
        return
    try:
        L1, L2, mu = separating_support_lines(P, Q)
    except ValueError:
        # overlapping draws are allowed to be rejected
        assert Region2([P]).contains(Q.vertices, 1e-9).any() or Region2([Q]).contains(P.vertices, 1e-9).any() \
            or not np.isfinite(hausdorff(P.vertices, Q.vertices))
        return
    scale = max(np.abs(P.vertices).max(), np.abs(Q.vertices).max(), 1)
    for L in (L1, L2):
        p, q = L.value(P.vertices) - L.offset, L.value(Q.vertices) - L.offset
        assert p.max() <= 1e-9 * scale and abs(p.max()) <= 1e-9 * scale
        assert q.min() >= -1e-9 * scale and abs(q.min()) <= 1e-9 * scale
        assert abs(L.value([mu])[0] - L.offset) <= 1e-9 * scale


def test_hausdorff_examples():
    z = np.array([0, 1j, 2])
    assert hausdorff(z, z) == 0
    assert hausdorff([0], [3]) == 3
    assert hausdorff([0, 1], [0, 1, 0.5]) == 0.5
    with pytest.raises(ValueError):
        hausdorff([], [1])


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30)
def test_hausdorff_symmetric(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(50) + 1j * rng.standard_normal(50)
    b = rng.standard_normal(30) + 1j * rng.standard_normal(30)
    assert hausdorff(a, b) == hausdorff(b, a)
    # brute-force oracle
    D = np.abs(a[:, None] - b[None, :])
    assert hausdorff(a, b) == pytest.approx(max(D.min(1).max(), D.min(0).max()))


def test_region_distance_exact():
    assert np.allclose(EX31.distance([0.5, 2, 2j]), [0, 1, np.sqrt(2)])
    assert SQUARE.distance([0.5 + 0.5j])[0] == 0


def test_region_hausdorff_scaled():
    big = Region2([[0, 1.1 + 1.1j, 1.1 - 1.1j], [0, -1.1 - 1.1j, -1.1 + 1.1j]])
    h = region_hausdorff(EX31, big, 0.01)
    # the outer vertices move by 0.1 along the diagonals
    assert h == pytest.approx(0.1 * np.sqrt(2), abs=1e-9)


def test_cloud_region_hausdorff():
    rng = np.random.default_rng(0)
    z = rng.uniform(0, 1, 20000) + 1j * rng.uniform(0, 1, 20000)
    assert cloud_region_hausdorff(SQUARE, z) <= 0.02
    assert cloud_region_hausdorff(SQUARE, np.append(z, 2)) == pytest.approx(1.0, abs=1e-9)


def test_star_polygon_membership():
    th = np.linspace(-np.pi, np.pi, 3, endpoint=False)
    tri = StarPolygon(0j, np.exp(1j * th) * 2)
    assert tri.contains([0, 0.5, -0.2 + 0.1j]).all()
    assert not tri.contains([3.0])[0]
    # agreement with the convex triangle it describes
    rng = np.random.default_rng(2)
    z = 3 * (rng.standard_normal(5000) + 1j * rng.standard_normal(5000))
    P = convex_hull(tri.vertices)
    assert np.array_equal(tri.contains(z, 0.0), P.contains(z, 0.0)) or \
        np.abs(P.signed_distance(z[tri.contains(z) != P.contains(z)])).max() <= 1e-12
    assert np.allclose(tri.distance(z), P.distance(z), atol=1e-12)


def test_region_json_roundtrip():
    obj = json.loads(json.dumps(EX32.to_json()))
    assert set(obj) == {"parts"}
    assert all(len(pt) == 2 for part in obj["parts"] for pt in part)
    R = Region2.from_json(obj)
    assert region_hausdorff(R, EX32, 0.05) <= 1e-12


def test_svg_viewbox():
    svg = region_to_svg(EX31, kernel=[0j])
    assert svg.startswith("<svg") and 'viewBox="-1.1 -1.1 2.2 2.2"' in svg
    assert svg.count("<polygon") == 2 and svg.count("<circle") == 1


def test_polygon_bad_input():
    with pytest.raises(ValueError):
        Region2([])
    with pytest.raises(ValueError):
        convex_hull([])
    with pytest.raises(ValueError):
        convex_hull([np.nan])
    assert isinstance(convex_hull([1]), Polygon)


@given(st.integers(0, 2**32 - 1), st.sampled_from([0.0, 1e-9, 1e-3]))
@settings(max_examples=40)
def test_fan_contains_matches_edge_scan(seed, tol):
    # many-vertex polygons take the wedge search; it must agree with the full scan
    rng = np.random.default_rng(seed)
    th = np.sort(rng.random(int(rng.integers(16, 600)))) * 2 * np.pi
    P = convex_hull(np.exp(1j * th) * (1 + 0.5j * rng.random()))
    q = 1.5 * (rng.standard_normal(2000) + 1j * rng.standard_normal(2000))
    q = np.concatenate([q, P.vertices, (P.vertices + np.roll(P.vertices, -1)) / 2])
    assert np.array_equal(P.contains(q, tol), P.signed_distance(q) <= tol)
