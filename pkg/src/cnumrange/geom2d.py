"""Planar geometry: hulls, unions of convex parts, star/convexity certificates.

Points in the plane are stored as complex numbers throughout.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .matcore import SeedLike, as_generator

_ORIENT_ERR = 4.0 * np.finfo(float).eps


def _as_points(points) -> np.ndarray:
    P = np.asarray(points)
    if P.ndim == 2 and P.shape[1] == 2 and not np.iscomplexobj(P):
        P = P[:, 0] + 1j * P[:, 1]
    return np.atleast_1d(P.astype(complex).ravel())


def orient(a: complex, b: complex, c: complex) -> int:
    """Sign of the turn a -> b -> c (+1 left, -1 right, 0 collinear).

    Falls back to exact rational arithmetic when the floating determinant
    is inside its rounding error bound.
    """
    l = (b.real - a.real) * (c.imag - a.imag)
    r = (b.imag - a.imag) * (c.real - a.real)
    det = l - r
    if abs(det) > _ORIENT_ERR * (abs(l) + abs(r)):
        return 1 if det > 0 else -1
    ax, ay = Fraction(a.real), Fraction(a.imag)
    exact = (Fraction(b.real) - ax) * (Fraction(c.imag) - ay) - (Fraction(b.imag) - ay) * (Fraction(c.real) - ax)
    return (exact > 0) - (exact < 0)


@dataclass(eq=False)
class Polygon:
    """Convex polygon, counter-clockwise; may degenerate to a segment or a point."""

    vertices: np.ndarray

    def __post_init__(self):
        self.vertices = _as_points(self.vertices)
        if len(self.vertices) == 0:
            raise ValueError("polygon needs at least one vertex")

    def __len__(self):
        return len(self.vertices)

    @property
    def kind(self) -> str:
        return {1: "point", 2: "segment"}.get(len(self.vertices), "polygon")

    @cached_property
    def area(self) -> float:
        v = self.vertices
        if len(v) < 3:
            return 0.0
        w = np.roll(v, -1)
        return float(0.5 * np.sum(v.real * w.imag - w.real * v.imag))

    @cached_property
    def _piece_order(self) -> np.ndarray:
        bb = self._bboxes
        return np.argsort(-(bb[:, 2] - bb[:, 0]) * (bb[:, 3] - bb[:, 1]), kind="stable")

    @cached_property
    def bbox(self) -> Tuple[float, float, float, float]:
        v = self.vertices
        return float(v.real.min()), float(v.imag.min()), float(v.real.max()), float(v.imag.max())

    @cached_property
    def _edges(self):
        v = self.vertices
        w = np.roll(v, -1)
        d = w - v
        length = np.abs(d)
        keep = length > 0
        v, d, length = v[keep], d[keep], length[keep]
        # outward normal of a CCW edge is the edge direction rotated by -90 degrees
        normal = -1j * d / length
        offset = (np.conj(normal) * v).real
        return normal, offset

    def signed_distance(self, points) -> np.ndarray:
        """Max over edges of the outward offset; exact distance outside segments/points."""
        P = _as_points(points)
        if self.kind == "point":
            return np.abs(P - self.vertices[0])
        if self.kind == "segment":
            return _segment_distance(P, self.vertices[0], self.vertices[1])
        normal, offset = self._edges
        return ((np.conj(normal)[None, :] * P[:, None]).real - offset[None, :]).max(axis=1)

    @cached_property
    def _fan(self):
        # vertex angles around the centroid, increasing from vertex 0
        v = self.vertices
        normal, _ = self._edges
        if len(v) < 16 or len(normal) != len(v):
            return None
        c = v.mean()
        base = np.angle(v[0] - c)
        ang = np.mod(np.angle(v - c) - base, 2 * np.pi)
        ang[0] = 0.0
        if np.any(np.diff(ang) <= 0):
            return None
        return c, base, ang

    def contains(self, points, tol: float = 0.0) -> np.ndarray:
        fan = self._fan if self.kind == "polygon" and tol >= 0 else None
        if fan is None:
            return self.signed_distance(points) <= tol
        # binary search for the wedge, then test its edge and both neighbours
        # (robust to rounding in the angles); only the tol band gets the full scan
        P = _as_points(points)
        c, base, ang = fan
        normal, offset = self._edges
        m = len(ang)
        k = np.searchsorted(ang, np.mod(np.angle(P - c) - base, 2 * np.pi), side="right") - 1
        nb = (k[:, None] + np.array([-1, 0, 1])[None, :]) % m
        s = ((np.conj(normal[nb]) * P[:, None]).real - offset[nb]).max(axis=1)
        out = s <= 0
        band = (s > 0) & (s <= tol)
        if band.any():
            out[band] = self.signed_distance(P[band]) <= tol
        return out

    def distance(self, points) -> np.ndarray:
        """Euclidean distance to the polygon (0 inside)."""
        P = _as_points(points)
        if self.kind != "polygon":
            return self.signed_distance(P)
        v = self.vertices
        w = np.roll(v, -1)
        d = np.full(P.shape, np.inf)
        for a, b in zip(v, w):
            d = np.minimum(d, _segment_distance(P, a, b))
        inside = self.signed_distance(P) <= 0
        d[inside] = 0.0
        return d

    def perimeter(self) -> float:
        v = self.vertices
        if len(v) == 1:
            return 0.0
        if len(v) == 2:
            return float(2 * abs(v[1] - v[0]))
        return float(np.sum(np.abs(np.roll(v, -1) - v)))

    def boundary_points(self, count: int) -> np.ndarray:
        """``count`` points spread uniformly by arc length along the boundary."""
        v = self.vertices
        if len(v) == 1 or count <= 0:
            return np.repeat(v[:1], max(count, 0))
        ring = np.append(v, v[0]) if len(v) > 2 else np.array([v[0], v[1], v[0]])
        seg = np.abs(np.diff(ring))
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        s = np.linspace(0.0, cum[-1], count, endpoint=False)
        k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(seg) - 1)
        frac = np.where(seg[k] > 0, (s - cum[k]) / np.where(seg[k] > 0, seg[k], 1), 0)
        return ring[k] + frac * (ring[k + 1] - ring[k])

    def to_list(self) -> list:
        return [[float(z.real), float(z.imag)] for z in self.vertices]


def _segment_distance(P: np.ndarray, a: complex, b: complex) -> np.ndarray:
    d = b - a
    L2 = abs(d) ** 2
    if L2 == 0:
        return np.abs(P - a)
    t = np.clip(((P - a) * np.conj(d)).real / L2, 0.0, 1.0)
    return np.abs(P - (a + t * d))


@dataclass(eq=False)
class StarPolygon:
    """Polygon strictly star-shaped about ``center`` (vertices in angular order).

    Semantically the union of the convex fan triangles
    ``(center, v_k, v_{k+1})``; membership uses an angular search instead of
    testing every triangle.
    """

    center: complex
    vertices: np.ndarray

    def __post_init__(self):
        self.center = complex(self.center)
        v = _as_points(self.vertices)
        ang = np.angle(v - self.center)
        order = np.argsort(ang, kind="stable")
        self.vertices = v[order]
        self._angles = ang[order]

    @cached_property
    def bbox(self):
        v = self.vertices
        return float(v.real.min()), float(v.imag.min()), float(v.real.max()), float(v.imag.max())

    def signed_distance(self, points) -> np.ndarray:
        P = _as_points(points)
        v = self.vertices
        m = len(v)
        ang = np.angle(P - self.center)
        k = np.searchsorted(self._angles, ang) - 1
        best = np.full(P.shape, np.inf)
        # check the wedge found and its neighbours to absorb ray-boundary rounding
        for shift in (-1, 0, 1):
            i = (k + shift) % m
            a, b = v[i], v[(i + 1) % m]
            e = b - a
            L = np.abs(e)
            L = np.where(L > 0, L, 1.0)
            # CCW edge: outside is to the right
            out = -((np.conj(e) * (P - a)).imag) / L
            # wedge membership of the ray direction
            ca = ((np.conj(a - self.center) * (P - self.center)).imag) >= -1e-12 * np.abs(P - self.center)
            cb = ((np.conj(P - self.center) * (b - self.center)).imag) >= -1e-12 * np.abs(P - self.center)
            val = np.where(ca & cb, out, np.inf)
            best = np.minimum(best, val)
        # no wedge matched (rounding at a ray): use the unsigned edge distance
        miss = ~np.isfinite(best)
        if np.any(miss):
            best[miss] = self._edge_distance(P[miss])
        best[P == self.center] = -np.inf
        return best

    def _edge_distance(self, P: np.ndarray) -> np.ndarray:
        v = self.vertices
        d = np.full(P.shape, np.inf)
        for a, b in zip(v, np.roll(v, -1)):
            d = np.minimum(d, _segment_distance(P, a, b))
        return d

    def contains(self, points, tol: float = 0.0) -> np.ndarray:
        return self.signed_distance(points) <= tol

    def distance(self, points) -> np.ndarray:
        P = _as_points(points)
        d = self._edge_distance(P)
        d[self.signed_distance(P) <= 0] = 0.0
        return d

    def triangles(self) -> List[Polygon]:
        v = self.vertices
        return [convex_hull([self.center, a, b]) for a, b in zip(v, np.roll(v, -1))]

    def boundary_points(self, count: int) -> np.ndarray:
        return _ring_points(self.vertices, count)

    def perimeter(self) -> float:
        v = self.vertices
        return float(np.sum(np.abs(np.roll(v, -1) - v)))


def _ring_points(v: np.ndarray, count: int) -> np.ndarray:
    ring = np.append(v, v[0])
    seg = np.abs(np.diff(ring))
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    s = np.linspace(0.0, cum[-1], count, endpoint=False)
    k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(seg) - 1)
    frac = np.where(seg[k] > 0, (s - cum[k]) / np.where(seg[k] > 0, seg[k], 1), 0)
    return ring[k] + frac * (ring[k + 1] - ring[k])


@dataclass(eq=False)
class Region2:
    """Union of convex polygons (``parts``) and star-shaped fans (``stars``)."""

    parts: List[Polygon] = field(default_factory=list)
    label: str = ""
    stars: List[StarPolygon] = field(default_factory=list)

    def __post_init__(self):
        self.parts = [p if isinstance(p, Polygon) else convex_hull(p) for p in self.parts]
        if not self.parts and not self.stars:
            raise ValueError("region needs at least one part")

    @property
    def pieces(self):
        return list(self.parts) + list(self.stars)

    @cached_property
    def _bboxes(self) -> np.ndarray:
        return np.array([p.bbox for p in self.pieces])

    @cached_property
    def _piece_order(self) -> np.ndarray:
        bb = self._bboxes
        return np.argsort(-(bb[:, 2] - bb[:, 0]) * (bb[:, 3] - bb[:, 1]), kind="stable")

    @cached_property
    def bbox(self) -> Tuple[float, float, float, float]:
        b = self._bboxes
        return float(b[:, 0].min()), float(b[:, 1].min()), float(b[:, 2].max()), float(b[:, 3].max())

    @property
    def diameter(self) -> float:
        x0, y0, x1, y1 = self.bbox
        return float(np.hypot(x1 - x0, y1 - y0))

    def vertices(self) -> np.ndarray:
        return np.concatenate([p.vertices for p in self.pieces])

    def contains(self, points, tol: float = 0.0) -> np.ndarray:
        P = _as_points(points)
        result = np.zeros(P.shape, bool)
        if len(P) == 0:
            return result
        # sweep pieces (largest first) over x-sorted undecided points so each
        # piece only sees its own strip; decided points are dropped as they pile up
        order = np.argsort(P.real, kind="stable")
        xs = P.real[order]
        y = P.imag
        pieces = self.pieces
        for step, k in enumerate(self._piece_order):
            piece, (x0, y0, x1, y1) = pieces[k], self._bboxes[k]
            if step % 64 == 63 and len(order) > 64:
                keep = ~result[order]
                if 2 * keep.sum() < len(order):
                    order, xs = order[keep], xs[keep]
                    if len(order) == 0:
                        break
            lo = np.searchsorted(xs, x0 - tol, "left")
            hi = np.searchsorted(xs, x1 + tol, "right")
            if lo >= hi:
                continue
            idx = order[lo:hi]
            yi = y[idx]
            idx = idx[~result[idx] & (yi >= y0 - tol) & (yi <= y1 + tol)]
            if len(idx) == 0:
                continue
            result[idx[piece.contains(P[idx], tol)]] = True
        return result

    @cached_property
    def _edge_index(self):
        # outside the union, distance = min over all piece edges; edges are cut
        # into pieces of length <= h so a midpoint KD-tree can prune them
        a = np.concatenate([p.vertices for p in self.pieces])
        b = np.concatenate([np.roll(p.vertices, -1) for p in self.pieces])
        L = np.abs(b - a)
        h = max(L.sum() / 200000, 1e-12)
        k = np.maximum(np.ceil(L / h).astype(np.int64), 1)
        rep = np.repeat(np.arange(len(a)), k)
        first = np.repeat(np.cumsum(k) - k, k)
        j = np.arange(len(rep)) - first
        kk = k[rep]
        sa = a[rep] + j / kk * (b[rep] - a[rep])
        sb = a[rep] + (j + 1) / kk * (b[rep] - a[rep])
        mid = 0.5 * (sa + sb)
        tree = cKDTree(np.c_[mid.real, mid.imag])
        return sa, sb, float(np.abs(sb - sa).max()) / 2, tree

    @staticmethod
    def _seg_dist(P: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        d = b - a
        L2 = np.abs(d) ** 2
        t = np.where(L2 > 0, ((P - a) * np.conj(d)).real / np.where(L2 > 0, L2, 1.0), 0.0)
        return np.abs(P - (a + np.clip(t, 0.0, 1.0) * d))

    def _outside_bound(self, Q: np.ndarray) -> np.ndarray:
        sa, sb, half, tree = self._edge_index
        k = min(8, len(sa))
        _, idx = tree.query(np.c_[Q.real, Q.imag], k=k)
        idx = idx.reshape(len(Q), k)
        return self._seg_dist(Q[:, None], sa[idx], sb[idx]).min(axis=1)

    def _outside_exact(self, Q: np.ndarray, ub: np.ndarray, chunk: int = 2048) -> np.ndarray:
        sa, sb, half, tree = self._edge_index
        out = ub.copy()
        for s in range(0, len(Q), chunk):
            q = Q[s:s + chunk]
            lists = tree.query_ball_point(np.c_[q.real, q.imag], ub[s:s + chunk] + half)
            cnt = np.fromiter((len(x) for x in lists), np.int64, len(lists))
            if cnt.sum() == 0:
                continue
            flat = np.fromiter(itertools.chain.from_iterable(lists), np.int64, int(cnt.sum()))
            owner = np.repeat(np.arange(len(q)), cnt)
            dist = self._seg_dist(q[owner], sa[flat], sb[flat])
            best = out[s:s + chunk]
            np.minimum.at(best, owner, dist)
        return out

    def distance(self, points) -> np.ndarray:
        """Exact Euclidean distance to the union (zero inside)."""
        P = _as_points(points)
        d = np.zeros(P.shape)
        out = np.nonzero(~self.contains(P, 0.0))[0]
        if len(out):
            Q = P[out]
            d[out] = self._outside_exact(Q, self._outside_bound(Q))
        return d

    def max_distance(self, points, batch: int = 4096) -> float:
        """``max(distance(points))`` without refining points that cannot attain it.

        Points are refined in decreasing order of their upper bound until the
        next bound falls below the best exact value.
        """
        P = _as_points(points)
        Q = P[~self.contains(P, 0.0)]
        if len(Q) == 0:
            return 0.0
        ub = self._outside_bound(Q)
        order = np.argsort(-ub, kind="stable")
        best = 0.0
        for start in range(0, len(order), batch):
            idx = order[start:start + batch]
            if ub[idx[0]] <= best:
                break
            best = max(best, float(self._outside_exact(Q[idx], ub[idx]).max()))
        return best

    def boundary_samples(self, count: int) -> np.ndarray:
        """``count`` points spread by arc length over all part boundaries."""
        pieces = self.pieces
        per = np.array([p.perimeter() for p in pieces])
        if count <= 0:
            return np.zeros(0, complex)
        if per.sum() == 0:
            return np.resize(self.vertices(), count)
        alloc = np.floor(count * per / per.sum()).astype(int)
        alloc[np.argsort(-per)[: count - alloc.sum()]] += 1
        out = [p.boundary_points(int(k)) for p, k in zip(pieces, alloc) if k > 0]
        return np.concatenate(out) if out else np.zeros(0, complex)

    def sample_points(self, spacing: float, max_boundary: int = 200000) -> np.ndarray:
        """Vertices, boundary samples and the members of a global lattice at ``spacing``."""
        x0, y0, x1, y1 = self.bbox
        xs = np.arange(x0, x1 + spacing, spacing)
        ys = np.arange(y0, y1 + spacing, spacing)
        g = (xs[:, None] + 1j * ys[None, :]).ravel()
        per = sum(p.perimeter() for p in self.pieces)
        nb = int(min(max(np.ceil(per / spacing), 1), max_boundary))
        return np.concatenate([np.unique(self.vertices()), self.boundary_samples(nb), g[self.contains(g, 0.0)]])

    def triangles(self) -> List[Polygon]:
        tri = list(self.parts)
        for s in self.stars:
            tri.extend(s.triangles())
        return tri

    def to_json(self) -> dict:
        out = {"parts": [p.to_list() for p in self.triangles()]}
        if self.label:
            out["label"] = self.label
        return out

    @classmethod
    def from_json(cls, obj) -> "Region2":
        if isinstance(obj, str):
            obj = json.loads(obj)
        parts = [convex_hull(np.array(p, float)) for p in obj["parts"]]
        return cls(parts=parts, label=obj.get("label", ""))


@dataclass(frozen=True)
class SupportLine:
    normal: complex
    offset: float
    contact_set: Tuple[complex, ...]

    def value(self, points) -> np.ndarray:
        return (np.conj(self.normal) * _as_points(points)).real


@dataclass
class StarCertificate:
    center: complex
    checked_rays: int
    violations: List[Tuple[complex, float]] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.valid


def convex_hull(points) -> Polygon:
    """Counter-clockwise convex hull (Andrew's monotone chain).

    Collinear input gives a two-vertex segment and a single distinct point
    gives a one-vertex polygon.  Vertices start at the lexicographically
    smallest point.
    """
    P = _as_points(points)
    if len(P) == 0:
        raise ValueError("convex hull of an empty set")
    if not np.all(np.isfinite(P)):
        raise ValueError("convex hull of non-finite points")
    P = np.unique(P)  # complex sort is lexicographic on (re, im)
    if len(P) > 64:
        P = _akl_toussaint(P)
    pts = [complex(z) for z in P]
    if len(pts) < 3:
        return Polygon(np.array(pts))

    def chain(seq):
        out: List[complex] = []
        for p in seq:
            while len(out) >= 2 and orient(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        hull = hull[:1]
    return Polygon(np.array(hull))


def _akl_toussaint(P: np.ndarray) -> np.ndarray:
    # discard points strictly inside the octagon of extreme points
    x, y = P.real, P.imag
    keys = [x, y, x + y, x - y]
    ext = []
    for k in keys:
        ext.append(P[np.argmin(k)])
        ext.append(P[np.argmax(k)])
    octagon = np.unique(np.array(ext))
    if len(octagon) < 3:
        return P
    inner = convex_hull(octagon) if len(octagon) <= 64 else None
    if inner is None or inner.kind != "polygon":
        return P
    normal, offset = inner._edges
    margin = 1e-9 * (1.0 + np.max(np.abs(P)))
    sd = ((np.conj(normal)[None, :] * P[:, None]).real - offset[None, :]).max(axis=1)
    return np.sort(P[sd > -margin])


def region_contains(R: Region2, p, tol: float = 0.0):
    res = R.contains(p, tol)
    return bool(res[0]) if np.ndim(p) == 0 else res


def region_distance(R: Region2, p) -> np.ndarray:
    return R.distance(p)


def segment_in_region(R: Region2, a: complex, b: complex, steps: int = 64, tol: float = 0.0) -> bool:
    if steps < 2:
        raise ValueError("steps must be >= 2")
    lam = np.linspace(0.0, 1.0, steps + 1)
    return bool(np.all(R.contains(a + lam * (b - a), tol)))


def _first_failures(R: Region2, mu: complex, targets: np.ndarray, steps: int, tol: float):
    """Index of the first failing sample on each segment [mu, target] (-1 if none)."""
    lam = np.linspace(0.0, 1.0, steps + 1)
    pts = mu + lam[None, :] * (targets[:, None] - mu)
    ok = R.contains(pts.ravel(), tol).reshape(pts.shape)
    bad = ~ok
    first = np.where(bad.any(axis=1), bad.argmax(axis=1), -1)
    return first, lam


def star_targets(R: Region2, boundary_samples: int, tol: float) -> np.ndarray:
    """Boundary samples plus the part vertices that are not interior to ``R``."""
    verts = np.unique(R.vertices())
    eps = 4 * tol + 1e-9 * max(R.diameter, 1.0)
    if len(verts) > 64:
        probes = verts[:, None] + eps * np.exp(2j * np.pi * np.arange(8) / 8)[None, :]
        interior = R.contains(probes.ravel(), tol).reshape(probes.shape).all(axis=1)
        verts = verts[~interior]
    return np.concatenate([verts, R.boundary_samples(boundary_samples)])


def certify_star_center(
    R: Region2,
    mu: complex,
    boundary_samples: int = 400,
    steps: int = 64,
    tol: float = 1e-9,
    first_only: bool = False,
    targets: Optional[np.ndarray] = None,
    chunk: int = 64,
) -> StarCertificate:
    """Check every segment from ``mu`` to sampled boundary targets of ``R``.

    A violation ``(target, lam)`` records the first sample
    ``mu + lam (target - mu)`` found outside ``R`` (inflated by ``tol``).
    """
    mu = complex(mu)
    if targets is None:
        targets = star_targets(R, boundary_samples, tol)
    cert = StarCertificate(center=mu, checked_rays=0)
    if not R.contains(np.array([mu]), tol)[0]:
        cert.violations.append((mu, 0.0))
        if first_only:
            return cert
    for start in range(0, len(targets), chunk):
        block = targets[start:start + chunk]
        first, lam = _first_failures(R, mu, block, steps, tol)
        cert.checked_rays += len(block)
        for z, k in zip(block, first):
            if k >= 0:
                cert.violations.append((complex(z), float(lam[k])))
        if first_only and cert.violations:
            break
    return cert


def kernel_estimate(
    R: Region2,
    grid_resolution: int = 60,
    tol: float = 1e-9,
    boundary_samples: int = 200,
    steps: int = 64,
    seed: SeedLike = 0,
    chunk: int = 8,
    batch_points: int = 200000,
) -> np.ndarray:
    """Grid points of the bounding box whose star certificate is valid.

    All candidates are screened together against shuffled target chunks, on a
    coarse segment grid first, so most of them are rejected in a few passes.
    An empty result says no grid point was certified; it is evidence of
    non-star-shapedness at this resolution, not a proof.
    """
    if grid_resolution < 2:
        raise ValueError("grid_resolution must be >= 2")
    x0, y0, x1, y1 = R.bbox
    xs = np.linspace(x0, x1, grid_resolution)
    ys = np.linspace(y0, y1, grid_resolution)
    grid = (xs[:, None] + 1j * ys[None, :]).ravel()
    alive = grid[R.contains(grid, tol)]
    targets = star_targets(R, boundary_samples, tol)
    rng = as_generator(seed)
    targets = targets[rng.permutation(len(targets))]
    for n_steps in (max(4, steps // 8), steps):
        lam = np.linspace(0.0, 1.0, n_steps + 1)[1:]
        start = 0
        while start < len(targets):
            if len(alive) == 0:
                return alive
            # keep each batch near batch_points once few candidates survive
            width = max(chunk, batch_points // (len(alive) * n_steps))
            block = targets[start:start + width]
            start += width
            pts = alive[:, None, None] + lam[None, None, :] * (block[None, :, None] - alive[:, None, None])
            ok = R.contains(pts.ravel(), tol).reshape(pts.shape).all(axis=(1, 2))
            alive = alive[ok]
    return alive


def certify_convex(
    R: Region2,
    boundary_samples: int = 2000,
    tol: float = 1e-9,
    seed: SeedLike = 0,
) -> Tuple[bool, Optional[complex]]:
    """Compare ``R`` with its convex hull on points drawn uniformly from the hull.

    Returns ``(True, None)`` or ``(False, witness)`` where the witness is the
    first sampled hull point outside ``R``.
    """
    H = convex_hull(np.concatenate([R.vertices(), R.boundary_samples(boundary_samples)]))
    rng = as_generator(seed)
    if H.kind == "polygon":
        x0, y0, x1, y1 = H.bbox
        pts = np.zeros(0, complex)
        while len(pts) < boundary_samples:
            z = rng.uniform(x0, x1, 4 * boundary_samples) + 1j * rng.uniform(y0, y1, 4 * boundary_samples)
            pts = np.concatenate([pts, z[H.contains(z, 0.0)]])
        pts = pts[:boundary_samples]
    elif H.kind == "segment":
        a, b = H.vertices
        pts = a + rng.uniform(0, 1, boundary_samples) * (b - a)
    else:
        return True, None
    ok = R.contains(pts, tol)
    if ok.all():
        return True, None
    return False, complex(pts[np.argmax(~ok)])


def _support(vertices: np.ndarray, t) -> np.ndarray:
    """Support value max_p n(t).p of a vertex set for an array of angles."""
    t = np.atleast_1d(t)
    return (np.exp(-1j * t)[:, None] * vertices[None, :]).real.max(axis=1)


def _q(P: np.ndarray, Q: np.ndarray, t) -> np.ndarray:
    t = np.atleast_1d(t)
    return (np.exp(-1j * t)[:, None] * Q[None, :]).real.min(axis=1) - _support(P, t)


def separating_support_lines(P: Polygon, Q: Polygon, tol: float = 1e-12):
    """Two common support lines of disjoint convex ``P`` and ``Q`` that separate them.

    Roots of ``q(t) = min_{w in Q} n(t).w - max_{p in P} n(t).p`` on either
    side of the best separating direction, found by a 200-point scan and
    bisection.  Returns ``(L1, L2, mu)`` with ``mu`` the intersection point.
    """
    Pv, Qv = P.vertices, Q.vertices
    scan = np.linspace(-np.pi, np.pi, 200, endpoint=False)
    qs = _q(Pv, Qv, scan)
    k0 = int(np.argmax(qs))
    if qs[k0] <= 0:
        raise ValueError("polygons are not disjoint")
    t0 = scan[k0]
    scale = max(np.max(np.abs(Pv)), np.max(np.abs(Qv)), 1.0)

    def root(direction: int) -> float:
        ts = t0 + direction * np.linspace(0, np.pi, 201)
        vals = _q(Pv, Qv, ts)
        neg = np.nonzero(vals <= 0)[0]
        j = int(neg[0])
        lo, hi = ts[j - 1], ts[j]
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            v = _q(Pv, Qv, mid)[0]
            if abs(v) <= tol * scale and v <= 0:
                return mid
            if v > 0:
                lo = mid
            else:
                hi = mid
            if abs(hi - lo) < 1e-16:
                break
        return hi

    t2 = root(+1)
    t1 = root(-1)
    cross = np.sin(t2 - t1)
    if abs(cross) < 1e-9:
        raise ValueError("support lines are parallel: the two sets lie on one line; "
                         "use the collinear branch (the union hull is the answer)")
    lines = []
    for t in (t1, t2):
        n = complex(np.exp(1j * t))
        off = float(_support(Pv, t)[0])
        vals = (np.conj(n) * np.concatenate([Pv, Qv])).real
        contact = tuple(complex(z) for z, v in zip(np.concatenate([Pv, Qv]), vals)
                        if abs(v - off) <= 1e-9 * scale)
        lines.append(SupportLine(normal=n, offset=off, contact_set=contact))
    # intersection of n1.x = o1 and n2.x = o2
    n1, n2 = lines[0].normal, lines[1].normal
    M = np.array([[n1.real, n1.imag], [n2.real, n2.imag]])
    x, y = np.linalg.solve(M, [lines[0].offset, lines[1].offset])
    return lines[0], lines[1], complex(x, y)


def hausdorff(A_pts, B_pts) -> float:
    """Symmetric Hausdorff distance between two finite point sets.

    Accepts complex 1-d arrays or real ``(N, d)`` arrays.
    """
    A = _as_real(A_pts)
    B = _as_real(B_pts)
    if len(A) == 0 or len(B) == 0:
        raise ValueError("hausdorff distance of an empty set")
    da, _ = cKDTree(B).query(A)
    db, _ = cKDTree(A).query(B)
    return float(max(da.max(), db.max()))


def _as_real(X) -> np.ndarray:
    X = np.asarray(X)
    if np.iscomplexobj(X):
        if X.ndim == 1:
            return np.c_[X.real, X.imag]
        return np.concatenate([X.real, X.imag], axis=1)
    if X.ndim == 1:
        return X[:, None].astype(float)
    return X.astype(float)


def region_hausdorff(R1: Region2, R2: Region2, spacing: float = 0.005) -> float:
    """Hausdorff distance of two regions, using exact distances from lattice samples."""
    d12 = R2.max_distance(R1.sample_points(spacing))
    d21 = R1.max_distance(R2.sample_points(spacing))
    return float(max(d12, d21))


def region_to_svg(
    R: Region2,
    kernel: Optional[Sequence[complex]] = None,
    lines: Sequence[SupportLine] = (),
    points: Optional[Sequence[complex]] = None,
    width: int = 480,
) -> str:
    """Static SVG of a region with optional kernel points, support lines and markers."""
    x0, y0, x1, y1 = R.bbox
    w, h = max(x1 - x0, 1e-9), max(y1 - y0, 1e-9)
    mx, my = 0.05 * w, 0.05 * h
    vb = (x0 - mx, -(y1 + my), w + 2 * mx, h + 2 * my)
    stroke = 0.004 * max(w, h)
    height = int(round(width * vb[3] / vb[2]))
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{vb[0]:.6g} {vb[1]:.6g} {vb[2]:.6g} {vb[3]:.6g}">',
        f'<g fill="#9ecae1" fill-opacity="0.6" stroke="#3182bd" stroke-width="{stroke:.4g}">',
    ]
    for part in R.pieces:
        v = part.vertices
        pts = " ".join(f"{z.real:.6g},{-z.imag:.6g}" for z in v)
        out.append(f'<polygon points="{pts}"/>')
    out.append("</g>")
    for L in lines:
        n = L.normal
        base = L.offset * n
        d = 1j * n * 2 * max(w, h)
        a, b = base - d, base + d
        out.append(f'<line x1="{a.real:.6g}" y1="{-a.imag:.6g}" x2="{b.real:.6g}" y2="{-b.imag:.6g}" '
                   f'stroke="#de2d26" stroke-width="{stroke:.4g}"/>')
    for group, color in ((kernel, "#31a354"), (points, "#636363")):
        if group is None:
            continue
        for z in group:
            out.append(f'<circle cx="{z.real:.6g}" cy="{-z.imag:.6g}" r="{2 * stroke:.4g}" fill="{color}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cloud_region_hausdorff(R: Region2, cloud, spacing: float = 0.01) -> float:
    """Hausdorff distance between a point cloud and a region.

    Cloud-to-region uses exact distances (zero for contained points); the
    region side is represented by its vertices plus a lattice of interior
    points at ``spacing``.
    """
    P = _as_points(cloud)
    d_out = R.max_distance(P)
    x0, y0, x1, y1 = R.bbox
    xs = np.arange(x0, x1 + spacing, spacing)
    ys = np.arange(y0, y1 + spacing, spacing)
    g = (xs[:, None] + 1j * ys[None, :]).ravel()
    probe = np.concatenate([np.unique(R.vertices()), g[R.contains(g, 0.0)], R.boundary_samples(4000)])
    d_in, _ = cKDTree(_as_real(P)).query(_as_real(probe))
    return float(max(d_out, d_in.max()))


def segment_failures(R: Region2, start: complex, ends: Sequence[complex], tol: float = 0.0,
                     steps: int = 2048, end_refine: int = 120) -> np.ndarray:
    """For each end point, whether the segment ``[start, end]`` leaves ``R``.

    The uniform ``steps`` grid is refined geometrically toward ``end`` so
    that boundary tangencies at the far end are resolved.
    """
    lam = np.unique(np.concatenate([np.linspace(0.0, 1.0, steps + 1),
                                    1.0 - np.logspace(-12, -2, end_refine)]))
    ends = np.atleast_1d(np.asarray(ends, complex))
    pts = start + lam[None, :] * (ends[:, None] - start)
    ok = R.contains(pts.ravel(), tol).reshape(pts.shape)
    return ~ok.all(axis=1)
