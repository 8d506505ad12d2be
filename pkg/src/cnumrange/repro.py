"""Canonical pipelines for the worked examples, each returning a pass/fail report."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import numpy as np

from .crange import classify_range, rank_one_disk_radius, sample_range, star_center_default
from .family import (
    MatrixFamily,
    SimplexGrid,
    direct_sum,
    family_slices,
    hat_family,
    product_numerical_range,
)
from .geom2d import (
    Region2,
    StarPolygon,
    certify_convex,
    certify_star_center,
    cloud_region_hausdorff,
    hausdorff,
    kernel_estimate,
    region_hausdorff,
    region_to_svg,
    segment_failures,
)
from .jointrange import (
    MatrixTuple,
    affine_image,
    certify_star_center_kd,
    diag_tuple_polytope,
    exact_diag_vertices,
    joint_family_slices,
    max_along_line,
    sample_joint,
    union_contains,
)
from .matcore import haar_vectors

W3 = np.exp(2j * np.pi / 3)
OMEGA = np.diag([1, W3, W3 ** 2])
E11 = np.diag([1.0, 0.0])
DIAG_A = np.diag([1 + 1j, 1 - 1j])


@dataclass
class Check:
    name: str
    passed: bool
    value: object = None
    threshold: object = None

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: value={self.value} threshold={self.threshold}"


@dataclass
class Report:
    fixture: str
    checks: List[Check] = field(default_factory=list)
    artifacts: Dict[str, str] = field(default_factory=dict)
    metrics: Dict[str, object] = field(default_factory=dict)

    def check(self, name: str, passed, value=None, threshold=None) -> bool:
        self.checks.append(Check(name, bool(passed), _plain(value), _plain(threshold)))
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> dict:
        return {"fixture": self.fixture, "verdict": "certified" if self.passed else "not certified",
                "checks": [c.__dict__ for c in self.checks], "metrics": {k: _plain(v) for k, v in self.metrics.items()},
                "artifacts": sorted(self.artifacts)}


def _plain(v):
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def gamma_point(theta, t):
    """``(t + (1-t) e^{i pi/3}) (2 e^{i theta} + e^{-2 i theta}) + (1 - 2t)/2``.

    Boundary point of the slice ``W_{C+I}(A(t))`` in the non-star example with
    ``C = diag(1, w, w^2)``.
    """
    theta = np.asarray(theta, float)
    t = np.asarray(t, float)
    out = (t + (1 - t) * np.exp(1j * np.pi / 3)) * (2 * np.exp(1j * theta) + np.exp(-2j * theta)) + (1 - 2 * t) / 2
    return complex(out) if out.ndim == 0 else out


def triangle_pair_region() -> Region2:
    return Region2([np.array([0, 1 + 1j, 1 - 1j]), np.array([0, -1 - 1j, -1 + 1j])], label="reference")


def three_piece_region() -> Region2:
    return Region2([np.array([0, -1 + 1j, -1 - 1j]), np.array([0, 2, 1 - 1j, 1 + 1j]),
                    np.array([2, 3 + 1j, 3 - 1j])], label="reference")


def ex3_1_slices(grid: int = 400, angles: int = 720):
    return family_slices(E11, MatrixFamily([DIAG_A, -DIAG_A]), SimplexGrid(2, grid), angles)


def ex3_2_slices(grid: int = 400, angles: int = 720):
    s1 = family_slices(E11, MatrixFamily([DIAG_A, -DIAG_A]), SimplexGrid(2, grid), angles)
    s2 = family_slices(E11, MatrixFamily([DIAG_A, -DIAG_A + 4 * np.eye(2)]), SimplexGrid(2, grid), angles)
    return s1.merge(s2)


def deltoid_star(t: float, count: int = 720) -> StarPolygon:
    theta = np.linspace(-np.pi, np.pi, count, endpoint=False)
    return StarPolygon(center=(1 - 2 * t) / 2, vertices=gamma_point(theta, t))


def ex4_1_region(t_grid: int = 200, count: int = 720) -> Region2:
    ts = np.linspace(0, 1, t_grid + 1)
    return Region2(stars=[deltoid_star(t, count) for t in ts], label="W_{C+I}(F)")


def ex4_1_matrices(t: float):
    A = OMEGA - np.eye(3) / 6
    B = np.exp(1j * np.pi / 3) * OMEGA + np.eye(3) / 6
    return OMEGA + np.eye(3), t * A + (1 - t) * B


def imaginary_axis_sweep(R: Region2, resolution: int = 200, tol: float = 1e-9):
    """Replay the two-tangent argument on imaginary-axis candidates.

    A candidate ``iy`` is ruled out when the segment to ``f(0,0)`` or the
    segment to ``f(0,1) = 5/2`` leaves the region.  Returns the candidates,
    the two failure masks and the axis interval.
    """
    ys = np.linspace(R.bbox[1], R.bbox[3], 20001)
    on_axis = ys[R.contains(1j * ys, tol)]
    lo, hi = float(on_axis.min()), float(on_axis.max())
    cand = 1j * np.linspace(lo, hi, resolution)
    a, b = gamma_point(0.0, 0.0), gamma_point(0.0, 1.0)
    fail_a = np.array([segment_failures(R, c, [a], tol)[0] for c in cand])
    fail_b = np.array([segment_failures(R, c, [b], tol)[0] for c in cand])
    return cand, fail_a, fail_b, (lo, hi)


VERTEX_TABLE = [
    ((-2 * np.pi / 3, 0.0), 2 - 1.5 * np.sqrt(3) * 1j),
    ((0.0, 0.0), 2 + 1.5 * np.sqrt(3) * 1j),
    ((2 * np.pi / 3, 0.0), -2.5 + 0j),
    ((-2 * np.pi / 3, 1.0), -2 - 1.5 * np.sqrt(3) * 1j),
    ((0.0, 1.0), 2.5 + 0j),
    ((2 * np.pi / 3, 1.0), -2 + 1.5 * np.sqrt(3) * 1j),
]

PAULI = (np.array([[0, 1], [1, 0]], complex), np.array([[0, -1j], [1j, 0]]), np.diag([1.0, -1.0]).astype(complex))


def at_generators():
    """``A_0`` and ``A_1`` whose hull is the ``A_t`` triangle family."""
    A0 = MatrixTuple([np.diag([0, 0, 1.0]), np.diag([1, 0, 1.0]), np.diag([0, 0, 1.0])])
    A1 = MatrixTuple([np.diag([1, 1, 0.0]), np.diag([0, 1, 0.0]), np.diag([0, 1, 0.0])])
    return A0, A1


def nonstar_generators():
    A = MatrixTuple([np.diag([0, 1, 0.0]), np.diag([1, 0, -1.0]), np.eye(3)])
    B = MatrixTuple([np.diag([1, 0, 0.0]), np.diag([0, -1, 1.0]), np.zeros((3, 3))])
    return A, B


def ex4_5_matrices():
    A = np.diag([np.exp(1j * np.pi / 3), np.exp(-1j * np.pi / 3), 0.95 * np.exp(1j * np.pi / 4)])
    gens = [np.exp(1j * np.pi / 3) * A, np.exp(-1j * np.pi / 3) * A, 0.95 * np.exp(1j * np.pi / 4) * A]
    return A, gens


def ex4_7_matrices():
    return [np.diag([1, np.exp(1j * np.pi / 3)]), np.diag([np.exp(2j * np.pi / 3), np.exp(1j * np.pi)]),
            np.diag([np.exp(4j * np.pi / 3), np.exp(5j * np.pi / 3)])]


# --- fixtures -----------------------------------------------------------------


def run_ex2_3b(seed: int = 0, samples: int = 100000) -> Report:
    r = Report("ex2_3b")
    C = np.diag([1.0, 2.0, 4.0])
    x, y = np.eye(3)[:, 0], np.eye(3)[:, 1]
    A1 = np.outer(x, y.conj())
    R = rank_one_disk_radius(C, 50, seed)
    r.check("disk radius equals (max - min eigenvalue)/2 for Hermitian C", abs(R - 1.5) <= 1e-4, R, 1.5)
    cloud = sample_range(C, A1, samples, seed)
    mod = np.abs(cloud.points)
    r.check("samples stay in the disk of radius R", mod.max() <= R + 1e-9, float(mod.max()), R)
    r.check("samples reach the rim", mod.max() >= 0.95 * R, float(mod.max()), 0.95 * R)
    r.check("W_C(0) is the origin", np.all(sample_range(C, np.zeros((3, 3)), 10, seed).points == 0))
    ang = np.angle(cloud.points[mod > 0.2 * R])
    hist = np.histogram(ang, bins=12, range=(-np.pi, np.pi))[0]
    spread = float(hist.max() / hist.min())
    r.check("argument distribution is rotation invariant", spread <= 1.1, spread, 1.1)
    r.artifacts["cloud.csv"] = cloud.to_csv()
    r.metrics["radius"] = R
    return r


def run_ex3_1(seed: int = 0, grid: int = 400, angles: int = 720) -> Report:
    r = Report("ex3_1")
    t0 = time.perf_counter()
    S = ex3_1_slices(grid, angles)
    R = S.region("W(conv{A,-A})")
    h = region_hausdorff(R, triangle_pair_region())
    r.check("hausdorff to the two-triangle region", h <= 0.02, h, 0.02)
    convex, witness = certify_convex(R, tol=S.membership_tol, seed=seed)
    r.check("region is not convex", not convex, witness)
    K = kernel_estimate(R, 101, tol=S.membership_tol, seed=seed)
    r.check("kernel estimate contains 0", np.any(np.abs(K) <= 1e-9), len(K))
    r.metrics.update(convex=convex, kernel_size=len(K), seconds=time.perf_counter() - t0)
    r.artifacts["region.svg"] = region_to_svg(R, kernel=K)
    r.artifacts["region.json"] = json.dumps(R.to_json())
    return r


def run_ex3_2(seed: int = 0, grid: int = 400, angles: int = 720) -> Report:
    r = Report("ex3_2")
    S = ex3_2_slices(grid, angles)
    R = S.region("W(F1 u F2)")
    h = region_hausdorff(R, three_piece_region())
    r.check("hausdorff to the three-piece region", h <= 0.02, h, 0.02)
    K = kernel_estimate(R, 100, tol=S.membership_tol, seed=seed)
    r.check("kernel estimate empty at resolution 100", len(K) == 0, len(K), 0)
    for mu in (0.0, 2.0):
        cert = certify_star_center(R, mu, tol=S.membership_tol, first_only=True)
        r.check(f"violating segment from mu={mu:g}", not cert.valid, cert.violations[:1])
    r.artifacts["region.svg"] = region_to_svg(R)
    r.artifacts["region.json"] = json.dumps(R.to_json())
    return r


def run_ex4_1(seed: int = 0, samples: int = 200000, kernel_resolution: int = 120, kernel_t_grid: int = 50) -> Report:
    r = Report("ex4_1")
    err = max(abs(gamma_point(th, t) - z) for (th, t), z in VERTEX_TABLE)
    r.check("vertex table reproduced", err <= 1e-12, err, 1e-12)
    th = np.linspace(-np.pi, np.pi, 20000, endpoint=False)
    base = StarPolygon(0j, 2 * np.exp(1j * th) + np.exp(-2j * th))
    cloud = sample_range(OMEGA, OMEGA, samples, seed)
    sd = base.signed_distance(cloud.points).max()
    r.check("W_C(C) samples inside the deltoid", sd <= 1e-6, float(sd), 1e-6)
    for t in (0.0, 0.3, 1.0):
        Cp, At = ex4_1_matrices(t)
        mu = star_center_default(Cp, At)
        r.check(f"star center of slice t={t:g}", abs(mu - (1 - 2 * t) / 2) <= 1e-12, mu, (1 - 2 * t) / 2)
    R = ex4_1_region()
    cand, fa, fb, (lo, hi) = imaginary_axis_sweep(R, 200)
    r.check("two-tangent sweep rules out every imaginary-axis candidate", np.all(fa | fb),
            int(np.sum(~(fa | fb))), 0)
    # coarser slice grid for the kernel scan: evidence only, and the full grid is slow
    K = kernel_estimate(ex4_1_region(kernel_t_grid), kernel_resolution, tol=1e-9, seed=seed)
    r.check(f"kernel estimate empty at resolution {kernel_resolution}", len(K) == 0, len(K), 0)
    r.metrics.update(axis_interval=[lo, hi], failing_toward_f00=int(fa.sum()), failing_toward_f01=int(fb.sum()))
    r.artifacts["region.svg"] = region_to_svg(R, points=[gamma_point(0, 0), gamma_point(0, 1)])
    return r


def run_ex4_5(seed: int = 0, samples: int = 100000, grid: int = 40) -> Report:
    r = Report("ex4_5")
    A, gens = ex4_5_matrices()
    M = np.kron(A, A)
    r.check("direct sum of the scaled copies equals A (x) A", np.allclose(direct_sum(*gens), M, atol=1e-15))
    prod = product_numerical_range(M, 3, 3, samples, seed)
    w1 = sample_range(np.diag([1.0, 0, 0]), A, samples, seed + 1).points
    w2 = sample_range(np.diag([1.0, 0, 0]), A, samples, seed + 2).points
    h1 = hausdorff(prod.points, w1 * w2)
    r.check("product range vs W(A).W(A)", h1 <= 0.05, h1, 0.05)
    S = family_slices(np.diag([1.0, 0, 0]), MatrixFamily(gens), SimplexGrid(3, grid), 360)
    h2 = cloud_region_hausdorff(S.region(), prod.points)
    r.check("product range vs W(conv{A_i}) slice union", h2 <= 0.05, h2, 0.05)
    r.artifacts["cloud.csv"] = prod.to_csv()
    return r


def run_ex4_7(seed: int = 0, grid: int = 40, vectors: int = 10000) -> Report:
    r = Report("ex4_7")
    mats = ex4_7_matrices()
    e1, e2 = np.eye(2)
    d1 = np.diag(hat_family(mats, [e1])[0])
    d2 = np.diag(hat_family(mats, [e2])[0])
    r.check("hat matrix at e1", np.allclose(d1, [1, W3, W3 ** 2], atol=1e-12), d1)
    r.check("hat matrix at e2", np.allclose(d2, np.exp(1j * np.pi * np.array([1, 3, 5]) / 3), atol=1e-12), d2)
    S = family_slices(E11, MatrixFamily(mats), SimplexGrid(3, grid), 180)
    R = S.region()
    X = haar_vectors(2, vectors, seed)
    hats = hat_family(mats, X)
    hat_region = Region2([np.diag(D) for D in hats])
    h = region_hausdorff(R, hat_region, spacing=0.02)
    r.check("W(F) and W(hat F) slice unions agree", h <= 0.03, h, 0.03)
    cert = certify_star_center(R, 0.0, tol=S.membership_tol)
    r.check("0 is a star center of W(F)", cert.valid, len(cert.violations))
    r.artifacts["region.svg"] = region_to_svg(R, kernel=[0j])
    return r


def run_thm4_3_demo(seed: int = 0, samples: int = 100000) -> Report:
    r = Report("thm4_3_demo")
    rng = np.random.default_rng(seed)
    for n, m in ((2, 2), (3, 3)):
        gens = []
        for _ in range(m):
            G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            gens.append(G / np.linalg.norm(G, 2))
        cloud = product_numerical_range(direct_sum(*gens), m, n, samples, seed)
        C = np.zeros((n, n))
        C[0, 0] = 1
        S = family_slices(C, MatrixFamily(gens), SimplexGrid(m, 200 if m == 2 else 40), 360)
        h = cloud_region_hausdorff(S.region(), cloud.points)
        r.check(f"product range of the direct sum vs W(conv) (m={m}, n={n})", h <= 0.05, h, 0.05)
    return r


def run_pauli(seed: int = 0, samples: int = 100000) -> Report:
    r = Report("pauli")
    cloud = sample_joint(E11, MatrixTuple(list(PAULI)), samples, seed)
    P = cloud.real_points
    dev = float(np.abs((P ** 2).sum(axis=1) - 1).max())
    r.check("samples on the unit sphere", dev <= 1e-9, dev, 1e-9)
    r.check("cloud is real", cloud.is_real)
    nearest = float(np.linalg.norm(P, axis=1).min())
    r.check("origin is not in the range", nearest >= 0.5, nearest, 0.5)
    r.artifacts["cloud.csv"] = cloud.to_csv()
    return r


def run_at_family(seed: int = 0, grid: int = 100) -> Report:
    r = Report("at_family")
    A0, A1 = at_generators()
    C = np.diag([1.0, 0, 0])
    slices = joint_family_slices(C, [A0, A1], SimplexGrid(2, grid))
    r.check("one triangle per grid weight", len(slices) == grid + 1, len(slices), grid + 1)
    err = 0.0
    for s in slices:
        t = s.parameter[1]
        want = np.array([[t, 1 - t, 0], [t, t, t], [1 - t, 1 - t, 1 - t]])
        err = max(err, float(np.abs(s.vertices - want).max()))
    r.check("slices are the stated triangles", err <= 1e-12, err, 1e-12)
    half = np.full(3, 0.5)
    r.check("(1/2,1/2,1/2) in every slice", all(s.contains(half[None])[0] for s in slices))
    cert = certify_star_center_kd(slices, half, targets=512, steps=64, seed=seed)
    r.check("(1/2,1/2,1/2) certified star center", cert.valid, len(cert.violations))
    witness = np.array([0.5, 0.5, 0.0])
    cert0 = certify_star_center_kd(slices, np.zeros(3), targets=witness[None], steps=64)
    r.check("(0,0,0) rejected toward (1/2,1/2,0)", not cert0.valid, cert0.violations[:1])
    cloud = sample_joint(C, A0.combine(A1, 0.5), 2000, seed)
    inside = union_contains([slices[grid // 2]], cloud.points)
    r.check("sampled W(A_1/2) lies in its triangle", inside.all(), float(inside.mean()), 1.0)
    r.artifacts["slices.json"] = json.dumps([s.to_json() for s in slices])
    return r


def nonstar_slices(grid: int = 1000):
    A, B = nonstar_generators()
    # weight order (B, A): slice at s = weight on A lies in the plane z = s
    return joint_family_slices(np.diag([1.0, 0, 0]), [B, A], SimplexGrid(2, grid))


def run_nonstar_joint(seed: int = 0, grid: int = 1000, t_count: int = 101) -> Report:
    r = Report("nonstar_joint")
    slices = nonstar_slices(grid)
    err = 0.0
    ts = np.linspace(0, 1, t_count)
    by_s = {int(round(sl.parameter[1] * grid)): sl for sl in slices}
    for t in ts:
        got = max_along_line([by_s[int(round(t * grid))]], [0.0, 0.0, t], [1.0, 0.0, 0.0])
        err = max(err, abs(got - (1 - 2 * t + 2 * t * t)))
    r.check("slice maxima equal 1 - 2t + 2t^2", err <= 1e-9, err, 1e-9)
    A, B = nonstar_generators()
    s56 = diag_tuple_polytope(B.combine(A, 5 / 6), np.diag([1.0, 0, 0]))
    d56 = float(s56.distance(np.array([[0, 0, 5 / 6]]))[0])
    r.check("(0,0,5/6) lies outside the slice at 5/6", d56 > 1e-3, d56, 1e-3)
    r.check("g-symmetry of the slice vertex sets (exact)", g_symmetry_exact(A, B, grid))
    for mu, target in (((0, 0, 0.5), (0, 0, 1.0)), ((0.05, 0, 0.5), (1, 0, 0)), ((0.1, 0, 0.5), (1, 0, 0))):
        cert = certify_star_center_kd(slices, np.array(mu, float), targets=np.array([target], float),
                                      steps=grid // 2)
        r.check(f"{mu} rejected toward {target}", not cert.valid, cert.violations[:1])
    return r


def g_symmetry_exact(A: MatrixTuple, B: MatrixTuple, grid: int) -> bool:
    """``g(a,b,c) = (a,-b,1-c)`` maps slice ``s`` onto slice ``1-s`` in exact rationals."""
    for k in range(grid + 1):
        s = Fraction(k, grid)
        here = exact_diag_vertices([B, A], [1 - s, s])
        there = exact_diag_vertices([B, A], [s, 1 - s])
        if frozenset((a, -b, 1 - c) for a, b, c in here) != there:
            return False
    return True


FIXTURES: Dict[str, Callable[..., Report]] = {
    "ex2_3b": run_ex2_3b,
    "ex3_1": run_ex3_1,
    "ex3_2": run_ex3_2,
    "ex4_1": run_ex4_1,
    "ex4_5": run_ex4_5,
    "ex4_7": run_ex4_7,
    "thm4_3_demo": run_thm4_3_demo,
    "pauli": run_pauli,
    "at_family": run_at_family,
    "nonstar_joint": run_nonstar_joint,
}


def repro(fixture: str, seed: int = 0) -> Report:
    if fixture not in FIXTURES:
        raise KeyError(f"unknown fixture {fixture!r}; known: {', '.join(FIXTURES)}")
    return FIXTURES[fixture](seed=seed)
