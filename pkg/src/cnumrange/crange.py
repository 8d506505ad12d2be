"""Single-matrix C-numerical range W_C(A) = {tr(C U* A U) : U unitary}."""

from __future__ import annotations

import io
import itertools
from dataclasses import dataclass, field
from typing import Any, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .geom2d import Polygon, convex_hull
from .matcore import (
    DEFAULT_TOL,
    Seed,
    as_matrix,
    as_seed,
    c_values,
    eigenvalues,
    essential_hermitian_direction,
    haar_unitaries,
    is_hermitian,
    is_normal,
    is_scalar,
    traceless_part,
)

GEOM_TOL = 1e-6


@dataclass(eq=False)
class RangeCloud:
    """Seeded sample of a C-numerical range."""

    points: np.ndarray
    seed: Optional[Seed] = None
    c_label: str = ""
    a_label: str = ""

    @property
    def count(self) -> int:
        return len(self.points)

    @property
    def diameter(self) -> float:
        p = self.points
        return float(np.hypot(np.ptp(p.real), np.ptp(p.imag)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("re,im\n")
        for z in self.points:
            buf.write(f"{float(z.real)!r},{float(z.imag)!r}\n")
        return buf.getvalue()


@dataclass(eq=False)
class BoundaryCurve:
    """Support-function trace of a convex range on an increasing angle grid."""

    angles: np.ndarray
    support_values: np.ndarray
    support_points: np.ndarray

    def polygon(self) -> Polygon:
        """Inscribed polygon: hull of achieved support points (all in the range)."""
        return convex_hull(self.support_points)

    def envelope(self) -> np.ndarray:
        """Vertices of the circumscribing polygon cut out by the support half-planes."""
        t, h = self.angles, self.support_values
        t2, h2 = np.roll(t, -1), np.roll(h, -1)
        det = np.sin(t2 - t)
        x = (h * np.sin(t2) - h2 * np.sin(t)) / np.where(det == 0, 1, det)
        y = (h2 * np.cos(t) - h * np.cos(t2)) / np.where(det == 0, 1, det)
        z = x + 1j * y
        return np.where(np.abs(det) > 1e-15, z, self.support_points)

    def inscription_error(self) -> float:
        """Hausdorff distance between the inscribed and circumscribed polygons."""
        return float(self.polygon().distance(self.envelope()).max())

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("theta,h,re,im\n")
        for t, h, z in zip(self.angles, self.support_values, self.support_points):
            buf.write(f"{float(t)!r},{float(h)!r},{float(z.real)!r},{float(z.imag)!r}\n")
        return buf.getvalue()


@dataclass
class RangeClass:
    kind: str  # Singleton | Segment | Polygon | General
    witness: Any = None


def sample_range(C, A, count: int, seed=0) -> RangeCloud:
    """``count`` values ``tr(C U* A U)`` over independent Haar unitaries."""
    C = as_matrix(C, "C")
    A = as_matrix(A, "A")
    if C.shape != A.shape:
        raise ValueError(f"dimension mismatch: C is {C.shape[0]}, A is {A.shape[0]}")
    if count < 1:
        raise ValueError("count must be >= 1")
    seed = as_seed(seed)
    U = haar_unitaries(C.shape[0], count, seed)
    return RangeCloud(points=c_values(C, A, U), seed=seed)


def star_center_default(C, A) -> complex:
    C = as_matrix(C, "C")
    A = as_matrix(A, "A")
    return complex(np.trace(C) * np.trace(A) / C.shape[0])


def _hermitian_theta(A: np.ndarray, theta: np.ndarray) -> np.ndarray:
    e = np.exp(-1j * np.atleast_1d(theta))[:, None, None]
    return (e * A[None] + np.conj(e) * A.conj().T[None]) / 2


def _require_hermitian(C: np.ndarray):
    if not is_hermitian(C):
        raise ValueError("C must be Hermitian for the exact support function")


def _support_batch(C: np.ndarray, A: np.ndarray, theta: np.ndarray):
    """Support values and achieving points for Hermitian ``C`` at several angles."""
    Ch = (C + C.conj().T) / 2
    c, P = np.linalg.eigh(Ch)
    c, P = c[::-1], P[:, ::-1]
    lam, Q = np.linalg.eigh(_hermitian_theta(A, theta))
    lam, Q = lam[:, ::-1], Q[:, :, ::-1]
    h = lam @ c
    # V = Q P* aligns the sorted eigenbases
    V = Q @ P.conj().T[None]
    pts = c_values(Ch, A, V)
    return h, pts


def support_function_hermitian(C, A, theta: float) -> Tuple[float, complex]:
    """``h(theta) = max_U Re(e^{-i theta} tr(C U* A U))`` and a point attaining it.

    Exact for Hermitian ``C``: the descending eigenvalues of ``C`` paired with
    those of ``(e^{-i theta} A + e^{i theta} A*)/2``.
    """
    C = as_matrix(C, "C")
    A = as_matrix(A, "A")
    _require_hermitian(C)
    h, pts = _support_batch(C, A, np.array([theta], float))
    return float(h[0]), complex(pts[0])


def support_values(C, A, theta) -> np.ndarray:
    C = as_matrix(C, "C")
    A = as_matrix(A, "A")
    _require_hermitian(C)
    return _support_batch(C, A, np.atleast_1d(np.asarray(theta, float)))[0]


def support_membership(C, A, p, angle_count: int = 720):
    """Largest violation ``max_theta Re(e^{-i theta} p) - h(theta)``.

    Non-positive iff ``p`` lies in the convex range ``W_C(A)`` (Hermitian C).
    ``p`` may be a point or an array of points.  Between grid angles the gap
    rises by at most ``L * step / 2`` with ``L`` bounding both slopes, so only
    points within that margin of zero get a bounded scalar refinement.
    """
    C = as_matrix(C, "C")
    A = as_matrix(A, "A")
    _require_hermitian(C)
    scalar = np.ndim(p) == 0
    P = np.atleast_1d(np.asarray(p, dtype=complex)).ravel()
    grid = np.linspace(0, 2 * np.pi, angle_count, endpoint=False)
    step = 2 * np.pi / angle_count
    h, pts = _support_batch(C, A, grid)
    G = (np.exp(-1j * grid)[None, :] * P[:, None]).real - h[None, :]
    k = np.argmax(G, axis=1)
    out = G[np.arange(len(P)), k]
    L = np.abs(P) + np.abs(pts).max()
    for j in np.nonzero(out > -L * step)[0]:
        z = P[j]

        def gap(t, z=z):
            t = np.atleast_1d(t)
            return (np.exp(-1j * t) * z).real - support_values(C, A, t)

        res = minimize_scalar(lambda t: -gap(t)[0], bounds=(grid[k[j]] - step, grid[k[j]] + step),
                              method="bounded", options={"xatol": 1e-12})
        out[j] = max(out[j], -res.fun)
    return float(out[0]) if scalar else out


def boundary_trace(C, A, angle_count: int = 720) -> BoundaryCurve:
    """Support points of ``W_C(A)`` on a uniform grid of ``angle_count`` angles."""
    if angle_count < 3:
        raise ValueError("angle_count must be >= 3")
    C = as_matrix(C, "C")
    A = as_matrix(A, "A")
    _require_hermitian(C)
    theta = np.linspace(0, 2 * np.pi, angle_count, endpoint=False)
    h, pts = _support_batch(C, A, theta)
    return BoundaryCurve(angles=theta, support_values=h, support_points=pts)


def permutation_vertex_hull(C, A, tol: float = DEFAULT_TOL) -> Tuple[np.ndarray, Polygon]:
    """All ``n!`` products ``sum_j c_j a_{sigma(j)}`` of the spectra and their hull."""
    C = as_matrix(C, "C")
    A = as_matrix(A, "A")
    n = C.shape[0]
    if A.shape != C.shape:
        raise ValueError("dimension mismatch")
    if n > 8:
        raise ValueError(f"refusing n = {n} > 8: n! permutation products")
    if not (is_normal(C, tol) and is_normal(A, tol)):
        raise ValueError("permutation vertices require normal C and A")
    c = eigenvalues(C).values
    a = eigenvalues(A).values
    perms = np.array(list(itertools.permutations(range(n))))
    pts = (a[perms] * c[None, :]).sum(axis=1)
    return pts, convex_hull(pts)


def _hermitian_reduction(C: np.ndarray, tol: float):
    """Write ``C = shift I + conj(gamma) H`` with ``H`` Hermitian, or return None."""
    gamma = essential_hermitian_direction(C, tol)
    if gamma is None:
        return None
    shift = np.trace(C) / C.shape[0]
    H = gamma * traceless_part(C)
    return shift, gamma, (H + H.conj().T) / 2


def _reduced_support(C: np.ndarray, A: np.ndarray, theta: np.ndarray, tol: float) -> np.ndarray:
    shift, gamma, H = _hermitian_reduction(C, tol)
    base = (np.exp(-1j * theta) * shift * np.trace(A)).real
    return base + _support_batch(H, A, theta + np.angle(gamma))[0]


def _collinear(z: np.ndarray, tol: float) -> bool:
    z = z - z.mean()
    if np.max(np.abs(z), initial=0.0) == 0:
        return True
    X = np.c_[z.real, z.imag]
    s = np.linalg.svd(X, compute_uv=False)
    return bool(len(s) < 2 or s[1] <= tol * max(s[0], 1.0))


def classify_range(C, A, tol: float = GEOM_TOL) -> RangeClass:
    """Singleton / Segment / Polygon / General shape class of ``W_C(A)``.

    Polygon is reported only when ``C`` is a shifted multiple of a Hermitian
    matrix (so the range is convex) and the support function of the range
    matches that of the permutation-vertex hull.
    """
    C = as_matrix(C, "C")
    A = as_matrix(A, "A")
    n = C.shape[0]
    if is_scalar(C, DEFAULT_TOL):
        raise ValueError("C is scalar: W_C(A) = {tr(C) tr(A)/n} carries no information")
    if is_scalar(A, DEFAULT_TOL):
        return RangeClass("Singleton", complex(np.trace(A) / n * np.trace(C)))
    gc = essential_hermitian_direction(C, DEFAULT_TOL)
    ga = essential_hermitian_direction(A, DEFAULT_TOL)
    if gc is not None and ga is not None:
        cvals = eigenvalues(C).values
        avals = eigenvalues(A).values
        if _collinear(cvals, tol) and _collinear(avals, tol):
            Hc = gc * traceless_part(C)
            Ha = ga * traceless_part(A)
            hc = np.sort(np.linalg.eigvalsh((Hc + Hc.conj().T) / 2))
            ha = np.sort(np.linalg.eigvalsh((Ha + Ha.conj().T) / 2))
            base = np.trace(C) * np.trace(A) / n
            rot = np.conj(gc * ga)
            lo = base + rot * float(hc @ ha[::-1])
            hi = base + rot * float(hc @ ha)
            ends = sorted([complex(lo), complex(hi)], key=lambda z: (round(z.real, 9), round(z.imag, 9)))
            return RangeClass("Segment", tuple(ends))
    if n <= 8 and is_normal(C) and is_normal(A) and (gc is not None or ga is not None):
        _, hull = permutation_vertex_hull(C, A)
        # W_C(A) = W_A(C): put the Hermitian-reducible matrix first
        X, Y = (C, A) if gc is not None else (A, C)
        theta = np.linspace(0, 2 * np.pi, 720, endpoint=False)
        if hull.kind == "polygon":
            edge_normals = np.angle(hull._edges[0])
            theta = np.concatenate([theta, edge_normals])
        h_range = _reduced_support(X, Y, theta, DEFAULT_TOL)
        h_hull = (np.exp(-1j * theta)[:, None] * hull.vertices[None, :]).real.max(axis=1)
        scale = max(1.0, float(np.max(np.abs(hull.vertices))))
        if np.all(h_range <= h_hull + tol * scale):
            if hull.kind == "point":
                return RangeClass("Singleton", complex(hull.vertices[0]))
            if hull.kind == "segment":
                return RangeClass("Segment", tuple(complex(z) for z in hull.vertices))
            return RangeClass("Polygon", [complex(z) for z in hull.vertices])
    return RangeClass("General", None)


def _alternating_max(C: np.ndarray, u: np.ndarray, v: np.ndarray, iters: int = 200):
    """Block ascent: best ``v`` orthogonal to ``u``, then best ``u`` orthogonal to ``v``."""
    best = abs(np.vdot(u, C @ v))
    for _ in range(iters):
        w = C.conj().T @ u
        w = w - u * np.vdot(u, w)
        if np.linalg.norm(w) > 1e-300:
            v = w / np.linalg.norm(w)
        w = C @ v
        w = w - v * np.vdot(v, w)
        if np.linalg.norm(w) > 1e-300:
            u = w / np.linalg.norm(w)
        val = abs(np.vdot(u, C @ v))
        if val <= best * (1 + 1e-14):
            break
        best = val
    return u, v


def _pair_from_params(x: np.ndarray, n: int):
    z = x[: 2 * n].view(complex)
    w = x[2 * n:].view(complex)
    u = z / np.linalg.norm(z)
    w = w - u * np.vdot(u, w)
    return u, w / np.linalg.norm(w)


def _refine_pair(C: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
    """Joint local ascent of ``|u* C v|`` over Gram-Schmidt parameters."""
    n = C.shape[0]

    def neg(x):
        a, b = _pair_from_params(x, n)
        return -abs(np.vdot(a, C @ b))

    x0 = np.concatenate([u.view(float), v.view(float)]).copy()
    res = minimize(neg, x0, method="BFGS", options={"gtol": 1e-12, "maxiter": 500})
    return float(max(-res.fun, abs(np.vdot(u, C @ v))))


def rank_one_disk_radius(C, samples: int = 50, seed=0) -> float:
    """``R = max |u* C v|`` over orthonormal pairs ``u, v``.

    Each restart starts from the first two columns of a Haar unitary (one
    substream per restart), alternates closed-form updates of ``v`` then
    ``u``, and finishes with a joint quasi-Newton ascent, since block
    updates alone can stall under the orthogonality coupling.  The estimate
    is nondecreasing in ``samples``.
    """
    C = as_matrix(C, "C")
    if is_scalar(C):
        raise ValueError("C is scalar")
    n = C.shape[0]
    seed = as_seed(seed)
    best = 0.0
    for k in range(samples):
        U = haar_unitaries(n, 1, seed.spawn(k))[0]
        u, v = _alternating_max(C, U[:, 0].copy(), U[:, 1].copy())
        best = max(best, _refine_pair(C, u, v))
    return best
