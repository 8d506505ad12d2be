"""Complex matrix primitives, seeded Haar sampling and eigensolvers."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

DEFAULT_TOL = 1e-10


class ConvergenceError(RuntimeError):
    """Raised when an eigensolver fails to converge."""

    def __init__(self, message: str, iterations: Optional[int] = None):
        super().__init__(message)
        self.iterations = iterations


@dataclass(frozen=True)
class Seed:
    """Reproducible random stream identified by ``(root, stream)``.

    Substreams for parallel grids are obtained with :meth:`spawn`; two
    ``Seed`` objects with equal fields always produce identical samples.
    """

    root: int
    stream: int = 0

    def __post_init__(self):
        if not (0 <= self.root < 2**64 and 0 <= self.stream < 2**64):
            raise ValueError("seed root and stream must be 64-bit unsigned integers")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.root, spawn_key=(self.stream,))
        return np.random.Generator(np.random.PCG64(ss))

    def spawn(self, index: int) -> "Seed":
        return Seed(self.root, int(index) % 2**64)


SeedLike = Union[int, Seed, np.random.Generator, None]


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, Seed):
        return seed.generator()
    if seed is None:
        return Seed(0).generator()
    return Seed(int(seed)).generator()


def as_seed(seed: Union[int, Seed, None]) -> Seed:
    if isinstance(seed, Seed):
        return seed
    return Seed(0 if seed is None else int(seed))


def as_matrix(A, name: str = "matrix") -> np.ndarray:
    M = np.asarray(A, dtype=complex)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


@dataclass(frozen=True)
class EigenSpectrum:
    values: np.ndarray
    hermitian_flag: bool

    def __len__(self):
        return len(self.values)


def hermitian_parts(A):
    """Return ``(H1, H2)`` with ``A = H1 + i H2`` and both Hermitian."""
    A = as_matrix(A)
    Ah = A.conj().T
    return (A + Ah) / 2, (A - Ah) / 2j


def _rel_scale(A: np.ndarray) -> float:
    return max(1.0, float(np.linalg.norm(A)))


def is_scalar(A, tol: float = DEFAULT_TOL) -> bool:
    A = as_matrix(A)
    n = A.shape[0]
    dev = A - np.trace(A) / n * np.eye(n)
    return bool(np.linalg.norm(dev) <= tol * _rel_scale(A))


def is_hermitian(A, tol: float = DEFAULT_TOL) -> bool:
    A = as_matrix(A)
    return bool(np.linalg.norm(A - A.conj().T) <= tol * _rel_scale(A))


def is_normal(A, tol: float = DEFAULT_TOL) -> bool:
    A = as_matrix(A)
    Ah = A.conj().T
    return bool(np.linalg.norm(A @ Ah - Ah @ A) <= tol * _rel_scale(A) ** 2)


def traceless_part(A) -> np.ndarray:
    A = as_matrix(A)
    n = A.shape[0]
    return A - np.trace(A) / n * np.eye(n)


def essential_hermitian_direction(A, tol: float = DEFAULT_TOL) -> Optional[complex]:
    """Unit ``alpha`` with ``alpha * (A - tr(A)/n I)`` Hermitian, or ``None``.

    The representative with argument in ``[0, pi)`` is returned; scalar
    matrices give ``1``.
    """
    A = as_matrix(A)
    B = traceless_part(A)
    scale = _rel_scale(A)
    if np.linalg.norm(B) <= tol * scale:
        return 1.0 + 0j
    # alpha B = conj(alpha) B*  <=>  alpha^2 B = B*; read alpha^2 off the largest entry.
    i, j = np.unravel_index(np.argmax(np.abs(B)), B.shape)
    alpha_sq = np.conj(B[j, i]) / B[i, j]
    if abs(abs(alpha_sq) - 1.0) > np.sqrt(tol):
        return None
    phase = (np.angle(alpha_sq) / 2) % np.pi
    if np.isclose(phase, np.pi, atol=1e-15):
        phase = 0.0
    alpha = complex(np.exp(1j * phase))
    R = alpha * B
    if np.linalg.norm(R - R.conj().T) > tol * scale:
        return None
    return alpha


def haar_unitaries(n: int, count: int, seed: SeedLike = None, chunk: int = 65536) -> np.ndarray:
    """``count`` Haar-distributed ``n x n`` unitaries, shape ``(count, n, n)``.

    Ginibre matrix, QR, then the columns are rephased so that ``R`` has a
    positive diagonal.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    rng = as_generator(seed)
    out = np.empty((count, n, n), dtype=complex)
    for start in range(0, count, chunk):
        k = min(chunk, count - start)
        # interleaved (re, im) draws keep the stream independent of ``chunk``
        G = rng.standard_normal((k, n, n, 2))
        Z = (G[..., 0] + 1j * G[..., 1]) / np.sqrt(2)
        Q, R = np.linalg.qr(Z)
        d = np.diagonal(R, axis1=1, axis2=2)
        out[start:start + k] = Q * (d / np.abs(d))[:, None, :]
    return out


def haar_unitary(n: int, seed: SeedLike = None) -> np.ndarray:
    return haar_unitaries(n, 1, seed)[0]


def haar_vectors(n: int, count: int, seed: SeedLike = None) -> np.ndarray:
    """Uniform unit vectors in ``C^n``: first columns of Haar unitaries."""
    return haar_unitaries(n, count, seed)[:, :, 0]


def eigenvalues(A, hermitian_hint: bool = False) -> EigenSpectrum:
    A = as_matrix(A)
    try:
        if hermitian_hint:
            if np.linalg.norm(A - A.conj().T) > 1e-10 * max(np.linalg.norm(A), 1e-300):
                raise ValueError("hermitian_hint given for a non-Hermitian matrix")
            vals = np.linalg.eigvalsh((A + A.conj().T) / 2)[::-1].astype(complex)
        else:
            vals = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        # LAPACK does not report its sweep count; the failing index is in the message.
        raise ConvergenceError(f"eigensolver did not converge: {exc}") from exc
    return EigenSpectrum(values=vals, hermitian_flag=hermitian_hint)


def _check_same_dim(*mats):
    dims = {M.shape[0] for M in mats}
    if len(dims) != 1:
        raise ValueError(f"dimension mismatch: {sorted(dims)}")


def c_values(C, A, U: np.ndarray) -> np.ndarray:
    """Vectorised ``tr(C U_k* A U_k)`` for a stack of unitaries ``U``."""
    C = as_matrix(C, "C")
    A = as_matrix(A, "A")
    U = np.asarray(U, dtype=complex)
    if U.ndim == 2:
        U = U[None]
    _check_same_dim(C, A, U[0])
    M = np.conj(np.swapaxes(U, 1, 2)) @ A @ U
    return np.einsum("ij,kji->k", C, M)


def c_value(C, A, U) -> complex:
    C = as_matrix(C, "C")
    A = as_matrix(A, "A")
    U = as_matrix(U, "U")
    _check_same_dim(C, A, U)
    if np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0])) > 1e-10 * _rel_scale(U):
        raise ValueError("U is not unitary")
    return complex(np.trace(C @ U.conj().T @ A @ U))


def matrix_to_json(A) -> dict:
    A = as_matrix(A)
    return {"n": int(A.shape[0]), "re": A.real.tolist(), "im": A.imag.tolist()}


def matrix_from_json(obj) -> np.ndarray:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        n = int(obj["n"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros((n, n))), dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix literal: {exc}") from exc
    if re.shape != (n, n) or im.shape != (n, n):
        raise ValueError(f"matrix literal entries do not match n={n}")
    return as_matrix(re + 1j * im)
