"""Unions of C-numerical ranges over convex matrix families."""

from __future__ import annotations

import itertools
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Callable, List, Optional, Sequence

import numpy as np
from scipy.linalg import block_diag
from scipy.spatial import cKDTree

from .crange import RangeCloud, boundary_trace, sample_range
from .geom2d import Polygon, Region2
from .matcore import Seed, as_matrix, as_seed, haar_vectors, is_hermitian, matrix_from_json, matrix_to_json

WEIGHT_TOL = 1e-12


def thread_count() -> int:
    env = os.environ.get("CRANGE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def parallel_map(fn: Callable, items: Sequence, threads: Optional[int] = None) -> list:
    """Ordered parallel map, capped by ``CRANGE_THREADS``."""
    threads = thread_count() if threads is None else max(1, threads)
    if threads == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@dataclass(eq=False)
class MatrixFamily:
    """``conv{A_1..A_m}`` (ConvexHull) or the finite set itself (ExplicitList)."""

    generators: List[np.ndarray]
    kind: str = "ConvexHull"

    def __post_init__(self):
        if not self.generators:
            raise ValueError("a family needs at least one generator")
        self.generators = [as_matrix(G, f"generator {k}") for k, G in enumerate(self.generators)]
        dims = {G.shape[0] for G in self.generators}
        if len(dims) != 1:
            raise ValueError(f"generators have mixed dimensions {sorted(dims)}")
        if self.kind not in ("ConvexHull", "ExplicitList"):
            raise ValueError(f"unknown family kind {self.kind!r}")

    @property
    def m(self) -> int:
        return len(self.generators)

    @property
    def n(self) -> int:
        return self.generators[0].shape[0]

    def spread(self) -> float:
        """Largest operator-norm distance between two generators."""
        G = self.generators
        return max((float(np.linalg.norm(a - b, 2)) for a, b in itertools.combinations(G, 2)), default=0.0)


@dataclass(eq=False)
class SimplexGrid:
    """Lattice points ``k / resolution`` of the standard simplex, lexicographic in ``k``."""

    m: int
    resolution: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("simplex grid needs m >= 1")
        if self.resolution < 1:
            raise ValueError("resolution must be >= 1")

    @classmethod
    def default(cls, m: int) -> "SimplexGrid":
        return cls(m, 200 if m <= 2 else 40)

    @cached_property
    def counts(self) -> np.ndarray:
        r, m = self.resolution, self.m
        if m == 1:
            return np.array([[r]])
        rows = [c + (r - sum(c),) for c in itertools.product(range(r + 1), repeat=m - 1) if sum(c) <= r]
        return np.array(rows, dtype=np.int64)

    @property
    def weights(self) -> np.ndarray:
        return self.counts / self.resolution

    def exact_weights(self) -> List[tuple]:
        r = self.resolution
        return [tuple(Fraction(int(k), r) for k in row) for row in self.counts]

    def __len__(self):
        return len(self.counts)


def _check_weights(weights, m: int) -> np.ndarray:
    w = np.asarray(weights, dtype=float).ravel()
    if len(w) != m:
        raise ValueError(f"expected {m} weights, got {len(w)}")
    if np.any(w < -WEIGHT_TOL):
        raise ValueError("weights must be non-negative")
    if abs(w.sum() - 1.0) > WEIGHT_TOL:
        raise ValueError(f"weights sum to {float(w.sum())!r}, not 1")
    return w


def slice_matrix(F: MatrixFamily, weights) -> np.ndarray:
    """``sum_i t_i A_i`` for simplex weights ``t``."""
    w = _check_weights(weights, F.m)
    out = np.zeros_like(F.generators[0])
    for t, G in zip(w, F.generators):
        if t != 0:
            out = out + t * G
    return out


def cloud_delta(points: np.ndarray) -> float:
    """Three times the median nearest-neighbour spacing of a planar cloud."""
    P = np.c_[points.real, points.imag]
    if len(P) < 2:
        return 0.0
    d, _ = cKDTree(P).query(P, k=2)
    return 3.0 * float(np.median(d[:, 1]))


@dataclass(eq=False)
class SliceSet:
    """One range per grid weight; polygons when ``convex_slices``, clouds otherwise."""

    weights: np.ndarray
    slices: List[Any]
    convex_slices: bool
    gap: float = 0.0
    inscription: float = 0.0

    def __len__(self):
        return len(self.slices)

    def __iter__(self):
        return iter(zip(self.weights, self.slices))

    def region(self, label: str = "") -> Region2:
        if not self.convex_slices:
            raise ValueError("cloud slices have no polygon region; use points()")
        return Region2(parts=list(self.slices), label=label)

    def points(self) -> np.ndarray:
        if self.convex_slices:
            return np.concatenate([p.vertices for p in self.slices])
        return np.concatenate([c.points for c in self.slices])

    @property
    def membership_tol(self) -> float:
        """Grid gap plus inscribed-polygon defect: how far the true union may
        poke out of the sampled one."""
        return self.gap + self.inscription

    def cloud_delta(self) -> float:
        return max(cloud_delta(c.points) for c in self.slices)

    def merge(self, other: "SliceSet") -> "SliceSet":
        if self.convex_slices != other.convex_slices:
            raise ValueError("cannot merge polygon and cloud slice sets")
        w = list(self.weights) + list(other.weights)
        return SliceSet(weights=np.array(w, dtype=object), slices=self.slices + other.slices,
                        convex_slices=self.convex_slices, gap=max(self.gap, other.gap),
                        inscription=max(self.inscription, other.inscription))


def family_slices(
    C,
    F: MatrixFamily,
    grid: Optional[SimplexGrid] = None,
    angle_count: int = 720,
    samples: int = 20000,
    seed=0,
    threads: Optional[int] = None,
) -> SliceSet:
    """Slice decomposition of ``W_C(F)``.

    Hermitian ``C`` gives exact inscribed polygons from the support function;
    otherwise each slice is a Haar cloud on its own seed substream.
    """
    C = as_matrix(C, "C")
    if C.shape[0] != F.n:
        raise ValueError(f"dimension mismatch: C is {C.shape[0]}, family is {F.n}")
    if F.kind == "ExplicitList":
        weights = np.eye(F.m)
        mats = list(F.generators)
        gap = 0.0
    else:
        grid = grid or SimplexGrid.default(F.m)
        if grid.m != F.m:
            raise ValueError(f"grid is for {grid.m} generators, family has {F.m}")
        weights = grid.weights
        mats = [slice_matrix(F, w) for w in weights]
        trace_norm = float(np.linalg.svd(C, compute_uv=False).sum())
        gap = (F.m - 1) / (2 * grid.resolution) * F.spread() * trace_norm if F.m > 1 else 0.0
    seed = as_seed(seed)
    if is_hermitian(C):
        curves = parallel_map(lambda A: boundary_trace(C, A, angle_count), mats, threads)
        polys = [c.polygon() for c in curves]
        ins = max(c.inscription_error() for c in curves)
        return SliceSet(weights=weights, slices=polys, convex_slices=True, gap=gap, inscription=ins)
    idx = list(range(len(mats)))

    def one(k):
        cloud = sample_range(C, mats[k], samples, seed.spawn(k))
        cloud.a_label = f"slice {k}"
        return cloud

    clouds = parallel_map(one, idx, threads)
    return SliceSet(weights=weights, slices=clouds, convex_slices=False, gap=gap)


def hat_family(matrices: Sequence, vectors) -> List[np.ndarray]:
    """``diag(x* A_1 x, ..., x* A_m x)`` for each unit vector ``x``."""
    mats = [as_matrix(A) for A in matrices]
    n = mats[0].shape[0]
    X = np.atleast_2d(np.asarray(vectors, dtype=complex))
    if X.shape[1] != n:
        raise ValueError(f"vectors must have length {n}")
    norms = np.linalg.norm(X, axis=1)
    if np.any(np.abs(norms - 1) > 1e-10):
        raise ValueError("hat_family needs unit vectors")
    vals = np.stack([np.einsum("ki,ij,kj->k", X.conj(), A, X) for A in mats], axis=1)
    return [np.diag(v) for v in vals]


def direct_sum(*matrices) -> np.ndarray:
    if len(matrices) == 1 and not hasattr(matrices[0], "shape") and isinstance(matrices[0], (list, tuple)):
        matrices = tuple(matrices[0])
    mats = [as_matrix(A) for A in matrices]
    return block_diag(*mats)


def product_numerical_range(M, m: int, n: int, count: int, seed=0) -> RangeCloud:
    """Samples ``(u (x) v)* M (u (x) v)`` with independent uniform unit ``u``, ``v``."""
    M = as_matrix(M, "M")
    if m < 1 or n < 1 or M.shape[0] != m * n:
        raise ValueError(f"dimension {M.shape[0]} does not factor as {m} x {n}")
    seed = as_seed(seed)
    rng = seed.generator()
    u = haar_vectors(m, count, rng)
    v = haar_vectors(n, count, rng)
    T = M.reshape(m, n, m, n)
    vals = np.einsum("ka,kb,abcd,kc,kd->k", u.conj(), v.conj(), T, u, v, optimize=True)
    return RangeCloud(points=vals, seed=seed, a_label="product range")


def family_manifest(C, generators, grid: int, angles: int = 720, samples: int = 20000, seed: int = 0) -> dict:
    return {"C": matrix_to_json(C), "generators": [matrix_to_json(G) for G in generators],
            "grid": int(grid), "angles": int(angles), "samples": int(samples), "seed": int(seed)}


def load_family_manifest(obj) -> dict:
    """Parse a family manifest into ``C``, ``family`` and the integer settings."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict):
        raise ValueError("family manifest must be a JSON object")
    try:
        C = matrix_from_json(obj["C"])
        gens = [matrix_from_json(g) for g in obj["generators"]]
    except KeyError as exc:
        raise ValueError(f"family manifest missing key {exc}") from exc
    fam = MatrixFamily(gens)
    return {"C": C, "family": fam,
            "grid": int(obj.get("grid", SimplexGrid.default(fam.m).resolution)),
            "angles": int(obj.get("angles", 720)),
            "samples": int(obj.get("samples", 20000)),
            "seed": int(obj.get("seed", 0))}
