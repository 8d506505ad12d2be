"""Joint C-numerical ranges of matrix tuples and their convex families."""

from __future__ import annotations

import io
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy.optimize import linprog

from .family import SimplexGrid, parallel_map
from .geom2d import StarCertificate
from .matcore import (
    DEFAULT_TOL,
    Seed,
    as_generator,
    as_matrix,
    as_seed,
    c_values,
    haar_unitaries,
    is_normal,
    is_scalar,
    matrix_from_json,
    matrix_to_json,
)

REAL_TOL = 1e-10
MEMBER_TOL = 1e-9


@dataclass(eq=False)
class MatrixTuple:
    entries: List[np.ndarray]

    def __post_init__(self):
        if len(self.entries) == 0:
            raise ValueError("a tuple needs at least one entry")
        self.entries = [as_matrix(A, f"entry {k}") for k, A in enumerate(self.entries)]
        dims = {A.shape[0] for A in self.entries}
        if len(dims) != 1:
            raise ValueError(f"tuple entries have mixed dimensions {sorted(dims)}")

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def n(self) -> int:
        return self.entries[0].shape[0]

    def __iter__(self):
        return iter(self.entries)

    def combine(self, other: "MatrixTuple", t: float) -> "MatrixTuple":
        """Entrywise ``(1 - t) self + t other``."""
        return MatrixTuple([(1 - t) * a + t * b for a, b in zip(self.entries, other.entries)])

    def to_json(self) -> dict:
        return {"entries": [matrix_to_json(A) for A in self.entries]}

    @classmethod
    def from_json(cls, obj) -> "MatrixTuple":
        if isinstance(obj, str):
            obj = json.loads(obj)
        if isinstance(obj, list):
            return cls([matrix_from_json(e) for e in obj])
        try:
            return cls([matrix_from_json(e) for e in obj["entries"]])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed tuple literal: {exc}") from exc


def _as_tuple(A) -> MatrixTuple:
    return A if isinstance(A, MatrixTuple) else MatrixTuple(list(A))


def _real_rows(X: np.ndarray) -> np.ndarray:
    """Complex m-vectors as real rows: ``R^m`` if real, else interleaved ``R^{2m}``."""
    X = np.atleast_2d(np.asarray(X, dtype=complex))
    if np.all(np.abs(X.imag) <= REAL_TOL):
        return X.real.copy()
    out = np.empty((X.shape[0], 2 * X.shape[1]))
    out[:, 0::2] = X.real
    out[:, 1::2] = X.imag
    return out


@dataclass(eq=False)
class JointCloud:
    points: np.ndarray  # (count, m) complex
    seed: Optional[Seed] = None
    parameter: Optional[np.ndarray] = None

    @property
    def count(self) -> int:
        return int(self.points.shape[0])

    @property
    def m(self) -> int:
        return int(self.points.shape[1])

    @property
    def is_real(self) -> bool:
        return bool(np.all(np.abs(self.points.imag) <= REAL_TOL))

    @property
    def real_points(self) -> np.ndarray:
        """Points in ``R^m`` if real, else as ``R^{2m}`` rows."""
        return _real_rows(self.points)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(f"re_{j},im_{j}" for j in range(1, self.m + 1)) + "\n")
        for row in self.points:
            buf.write(",".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row) + "\n")
        return buf.getvalue()


@dataclass(eq=False)
class PolytopeSlice:
    """Convex hull of ``vertices`` (rows, complex m-vectors) with its family weight."""

    vertices: np.ndarray
    parameter: Optional[np.ndarray] = None

    def __post_init__(self):
        self.vertices = np.atleast_2d(np.asarray(self.vertices, dtype=complex))

    @property
    def m(self) -> int:
        return int(self.vertices.shape[1])

    @cached_property
    def real_vertices(self) -> np.ndarray:
        return _real_rows(self.vertices)

    @cached_property
    def bbox(self):
        V = self.real_vertices
        return V.min(axis=0), V.max(axis=0)

    def distance(self, points) -> np.ndarray:
        return polytope_distance(self, points)

    def contains(self, points, tol: float = MEMBER_TOL) -> np.ndarray:
        return self.distance(points) <= tol

    def to_json(self) -> dict:
        V = self.vertices
        out = {"parameter": None if self.parameter is None else [float(x) for x in self.parameter],
               "vertices": V.real.tolist()}
        if np.any(np.abs(V.imag) > REAL_TOL):
            out["vertices_im"] = V.imag.tolist()
        return out

    @classmethod
    def from_json(cls, obj) -> "PolytopeSlice":
        V = np.asarray(obj["vertices"], float)
        if "vertices_im" in obj:
            V = V + 1j * np.asarray(obj["vertices_im"], float)
        p = obj.get("parameter")
        return cls(V, None if p is None else np.asarray(p, float))


def sample_joint(C, A, count: int, seed=0) -> JointCloud:
    """``(tr C U* A_1 U, ..., tr C U* A_m U)`` over ``count`` Haar unitaries.

    Uses the same unitary stream as ``sample_range`` for equal seeds.
    """
    C = as_matrix(C, "C")
    A = _as_tuple(A)
    if C.shape[0] != A.n:
        raise ValueError(f"dimension mismatch: C is {C.shape[0]}, tuple is {A.n}")
    if count < 1:
        raise ValueError("count must be >= 1")
    seed = as_seed(seed)
    U = haar_unitaries(A.n, count, seed)
    pts = np.stack([c_values(C, Aj, U) for Aj in A.entries], axis=1)
    return JointCloud(points=pts, seed=seed)


def affine_image(T, f, A, C=None) -> MatrixTuple:
    """Tuple ``B_i = sum_j T_ij A_j + f_i I``.

    Its joint C-range is ``T w + (tr C) f`` for ``w`` in the range of ``A``.
    """
    A = _as_tuple(A)
    T = np.atleast_2d(np.asarray(T, dtype=complex))
    f = np.asarray(f, dtype=complex).ravel()
    if T.shape != (A.m, A.m) or f.shape != (A.m,):
        raise ValueError(f"affine map must be {A.m}x{A.m} with a length-{A.m} shift")
    if C is not None and as_matrix(C, "C").shape[0] != A.n:
        raise ValueError("dimension mismatch between C and the tuple")
    I = np.eye(A.n)
    return MatrixTuple([sum(T[i, j] * A.entries[j] for j in range(A.m)) + f[i] * I for i in range(A.m)])


def _traceless_rows(A: MatrixTuple) -> np.ndarray:
    n = A.n
    return np.stack([(X - np.trace(X) / n * np.eye(n)).ravel() for X in A.entries])


def flat_dimension(A, tol: float = DEFAULT_TOL) -> int:
    """Numerical rank of the traceless parts of the tuple."""
    A = _as_tuple(A)
    s = np.linalg.svd(_traceless_rows(A), compute_uv=False)
    if s.size == 0 or s[0] <= tol:
        return 0
    return int(np.sum(s > tol * s[0]))


def flat_basis(C, A, tol: float = DEFAULT_TOL):
    """Base point and orthonormal real directions of the affine flat holding
    the joint C-range.

    Each coordinate is ``(tr C)(tr A_j)/n + tr(C U* B_j U)`` with ``B_j``
    traceless, so the range sits in ``base + {(<X, B_j>)_j : X}``; the real
    span of those pairing vectors is the row space of the real-stacked
    ``B`` coefficients.
    """
    C = as_matrix(C, "C")
    A = _as_tuple(A)
    n = A.n
    base = np.array([np.trace(C) * np.trace(X) / n for X in A.entries])
    B = _traceless_rows(A)  # m x n^2, w_j = sum_k Y_k B_jk with Y = vec(U C U*)^T
    # real-linear map Y -> (Re w, Im w); directions = column space of that map
    M = np.concatenate([np.concatenate([B.real, -B.imag], axis=1),
                        np.concatenate([B.imag, B.real], axis=1)], axis=0)
    U_, s, _ = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(s > tol * max(s[0], 1e-300))) if s.size else 0
    dirs = U_[:, :rank]  # rows: (Re w_1..m, Im w_1..m)
    return base, dirs


def _rank_one_shift(C: np.ndarray, tol: float):
    """``(a, b)`` with ``C`` unitarily similar to ``a E11 + b I``, else None."""
    n = C.shape[0]
    if not is_normal(C, tol):
        return None
    ev = np.linalg.eigvals(C)
    for k in range(n):
        rest = np.delete(ev, k)
        if np.all(np.abs(rest - rest.mean()) <= np.sqrt(tol) * max(1.0, np.abs(ev).max())):
            b = rest.mean() if n > 1 else 0.0
            return complex(ev[k] - b), complex(b)
    return None


def diag_tuple_polytope(A, C=None, parameter=None, tol: float = DEFAULT_TOL) -> PolytopeSlice:
    """Exact joint range of a diagonal tuple: hull of its joint diagonal columns.

    With ``C = a P + b I`` (``P`` a rank-one projection) the vertices become
    ``a * column_k + b * (tr A_1, ..., tr A_m)``; ``C = None`` means ``E11``.
    """
    A = _as_tuple(A)
    for k, X in enumerate(A.entries):
        off = X - np.diag(np.diag(X))
        if np.linalg.norm(off) > tol * max(1.0, float(np.linalg.norm(X))):
            raise ValueError(f"entry {k} is not diagonal")
    cols = np.stack([np.diag(X) for X in A.entries], axis=1)  # n x m
    if C is not None:
        C = as_matrix(C, "C")
        ab = _rank_one_shift(C, tol)
        if ab is None:
            raise ValueError("exact polytopes need C of the form a P + b I with P a rank-one projection")
        a, b = ab
        cols = a * cols + b * cols.sum(axis=0)[None, :]
    return PolytopeSlice(cols, None if parameter is None else np.asarray(parameter, float))


def exact_diag_vertices(generators: Sequence, weights: Sequence[Fraction]) -> frozenset:
    """Vertex set of a diagonal slice in exact rationals (floats read exactly)."""
    gens = [_as_tuple(g) for g in generators]
    n, m = gens[0].n, gens[0].m
    verts = set()
    for k in range(n):
        col = []
        for j in range(m):
            val = Fraction(0)
            for w, g in zip(weights, gens):
                z = g.entries[j][k, k]
                if z.imag != 0:
                    raise ValueError("exact vertices need real diagonal entries")
                val += Fraction(w) * Fraction(float(z.real))
            col.append(val)
        verts.add(tuple(col))
    return frozenset(verts)


def _is_diagonal(A: MatrixTuple, tol: float = DEFAULT_TOL) -> bool:
    return all(np.linalg.norm(X - np.diag(np.diag(X))) <= tol * max(1.0, float(np.linalg.norm(X)))
               for X in A.entries)


def joint_family_slices(C, generators: Sequence, grid: Optional[SimplexGrid] = None,
                        samples: int = 20000, seed=0, threads: Optional[int] = None) -> list:
    """One slice per grid weight of ``conv{generators}``.

    Diagonal tuples with ``C = a P + b I`` give exact polytopes; anything
    else is sampled.
    """
    C = as_matrix(C, "C")
    gens = [_as_tuple(g) for g in generators]
    if len({(g.m, g.n) for g in gens}) != 1:
        raise ValueError("generators must share arity and dimension")
    if gens[0].n != C.shape[0]:
        raise ValueError("dimension mismatch between C and the generators")
    m = len(gens)
    grid = grid or SimplexGrid.default(m)
    if grid.m != m:
        raise ValueError(f"grid is for {grid.m} generators, got {m}")
    weights = grid.weights
    tuples = [MatrixTuple([sum(w[i] * gens[i].entries[j] for i in range(m)) for j in range(gens[0].m)])
              for w in weights]
    exact = all(_is_diagonal(g) for g in gens) and _rank_one_shift(C, DEFAULT_TOL) is not None
    if exact:
        return [diag_tuple_polytope(T, C, parameter=w) for T, w in zip(tuples, weights)]
    seed = as_seed(seed)

    def one(k):
        cloud = sample_joint(C, tuples[k], samples, seed.spawn(k))
        cloud.parameter = weights[k]
        return cloud

    return parallel_map(one, list(range(len(tuples))), threads)


def _face_distance(V: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Distance from rows of ``P`` to the hull of rows of ``V`` by face enumeration."""
    k = V.shape[0]
    best = np.full(len(P), np.inf)
    for size in range(1, k + 1):
        for S in itertools.combinations(range(k), size):
            v0 = V[S[0]]
            D = V[list(S[1:])] - v0  # (size-1, d)
            X = P - v0
            if size == 1:
                best = np.minimum(best, np.linalg.norm(X, axis=1))
                continue
            G = D @ D.T
            if np.linalg.matrix_rank(G, tol=1e-12 * max(1.0, np.abs(G).max())) < size - 1:
                continue
            coef = np.linalg.solve(G, D @ X.T).T  # (N, size-1)
            bary_ok = (coef >= -1e-12).all(axis=1) & (coef.sum(axis=1) <= 1 + 1e-12)
            if not bary_ok.any():
                continue
            resid = np.linalg.norm(X - coef @ D, axis=1)
            best = np.where(bary_ok, np.minimum(best, resid), best)
    return best


def polytope_distance(S: PolytopeSlice, points) -> np.ndarray:
    """Euclidean distance from each point to the slice polytope."""
    P = np.atleast_2d(np.asarray(points, dtype=complex))
    if P.shape[1] != S.m:
        raise ValueError(f"points must have {S.m} coordinates")
    V = S.real_vertices
    Pr = P.real if V.shape[1] == S.m else _interleave(P)
    # drop repeated vertices before enumerating faces
    V = np.unique(np.round(V, 15), axis=0)
    return _face_distance(V, Pr)


def _interleave(P: np.ndarray) -> np.ndarray:
    out = np.empty((P.shape[0], 2 * P.shape[1]))
    out[:, 0::2] = P.real
    out[:, 1::2] = P.imag
    return out


def _union_contains(slices: Sequence[PolytopeSlice], points: np.ndarray, tol: float) -> np.ndarray:
    P = np.atleast_2d(np.asarray(points, dtype=complex))
    hit = np.zeros(len(P), bool)
    real = all(s.real_vertices.shape[1] == s.m for s in slices)
    Pr = P.real if real else _interleave(P)
    for s in slices:
        lo, hi = s.bbox
        cand = ~hit & np.all((Pr >= lo - tol) & (Pr <= hi + tol), axis=1)
        if not cand.any():
            continue
        idx = np.nonzero(cand)[0]
        d = polytope_distance(s, P[idx])
        hit[idx[d <= tol]] = True
    return hit


def union_contains(slices, points, tol: float = MEMBER_TOL) -> np.ndarray:
    return _union_contains(slices, points, tol)


def kd_targets(slices: Sequence[PolytopeSlice], targets: int, seed=0) -> np.ndarray:
    """Vertices and edge midpoints of evenly chosen slices, plus random hull points."""
    rng = as_generator(seed)
    n_sl = len(slices)
    pick = np.unique(np.round(np.linspace(0, n_sl - 1, min(n_sl, max(2, targets // 8)))).astype(int))
    out = []
    for k in pick:
        V = slices[k].vertices
        out.append(V)
        for a, b in itertools.combinations(range(len(V)), 2):
            out.append(((V[a] + V[b]) / 2)[None, :])
    T = np.concatenate(out)
    extra = max(0, targets - len(T))
    if extra:
        ks = rng.integers(0, n_sl, extra)
        rows = []
        for k in ks:
            V = slices[k].vertices
            w = rng.dirichlet(np.ones(len(V)))
            rows.append(w @ V)
        T = np.concatenate([T, np.array(rows)])
    return T


def certify_star_center_kd(
    slices: Sequence[PolytopeSlice],
    mu,
    targets: Union[int, np.ndarray] = 256,
    steps: int = 64,
    tol: float = MEMBER_TOL,
    seed=0,
) -> StarCertificate:
    """Sample segments from ``mu`` to targets in the slice union and test membership.

    Segment samples are ``(1 - k/steps) mu + (k/steps) target``; for families
    whose slices stack along a coordinate, choose ``steps`` so these land on
    the grid planes.  A violation ``(target, lam)`` is the first failure.
    """
    mu = np.asarray(mu, dtype=complex).ravel()
    if len({s.m for s in slices}) != 1 or slices[0].m != len(mu):
        raise ValueError("mu and all slices must share one arity")
    T = kd_targets(slices, targets, seed) if np.isscalar(targets) else np.atleast_2d(np.asarray(targets, complex))
    cert = StarCertificate(center=mu, checked_rays=0)
    if not _union_contains(slices, mu[None, :], tol)[0]:
        cert.violations.append((mu, 0.0))
    lam = np.arange(steps + 1) / steps

    def check(t):
        pts = (1 - lam)[:, None] * mu[None, :] + lam[:, None] * t[None, :]
        ok = _union_contains(slices, pts, tol)
        return None if ok.all() else float(lam[int(np.argmax(~ok))])

    results = parallel_map(check, list(T))
    for t, r in zip(T, results):
        cert.checked_rays += 1
        if r is not None:
            cert.violations.append((t.copy(), r))
    return cert


def max_along_line(slices: Sequence[PolytopeSlice], base, direction, tol: float = MEMBER_TOL) -> float:
    """``max{alpha : base + alpha direction in the union}`` by one LP per slice.

    Slices whose bounding box misses the line by more than ``tol`` in a
    coordinate fixed along the line are skipped.  Returns ``-inf`` if the
    line misses every slice.
    """
    base = np.asarray(base, float).ravel()
    d = np.asarray(direction, float).ravel()
    best = -np.inf
    fixed = np.abs(d) == 0
    for s in slices:
        V = s.real_vertices
        if V.shape[1] != len(base):
            raise ValueError("max_along_line works on real slices")
        lo, hi = s.bbox
        if np.any(fixed & ((base < lo - tol) | (base > hi + tol))):
            continue
        k = V.shape[0]
        # variables (alpha, lambda_1..k): maximise alpha s.t. V^T lambda - alpha d = base
        c = np.zeros(k + 1)
        c[0] = -1.0
        A_eq = np.zeros((len(base) + 1, k + 1))
        A_eq[:-1, 0] = -d
        A_eq[:-1, 1:] = V.T
        A_eq[-1, 1:] = 1.0
        b_eq = np.r_[base, 1.0]
        res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=[(None, None)] + [(0, None)] * k, method="highs")
        if res.status == 0:
            best = max(best, -res.fun)
    return float(best)
