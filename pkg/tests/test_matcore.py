import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cnumrange.matcore import (
    Seed,
    c_value,
    c_values,
    eigenvalues,
    essential_hermitian_direction,
    haar_unitaries,
    haar_unitary,
    hermitian_parts,
    is_hermitian,
    is_normal,
    is_scalar,
    matrix_from_json,
    matrix_to_json,
)

E11 = np.diag([1.0, 0.0])
E12 = np.array([[0, 1], [0, 0]], dtype=complex)


def rand_matrix(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


matrices = st.builds(
    lambda seed, n: rand_matrix(np.random.default_rng(seed), n),
    st.integers(0, 2**32 - 1),
    st.integers(1, 5),
)


def test_hermitian_parts_examples():
    H1, H2 = hermitian_parts(np.diag([1 + 1j, 1 - 1j]))
    assert np.allclose(H1, np.eye(2)) and np.allclose(H2, np.diag([1, -1]))
    H = np.array([[2, 1j], [-1j, 0]])
    H1, H2 = hermitian_parts(H)
    assert np.allclose(H1, H) and np.allclose(H2, 0)
    H1, H2 = hermitian_parts(1j * np.eye(2))
    assert np.allclose(H1, 0) and np.allclose(H2, np.eye(2))


@given(matrices)
def test_hermitian_parts_recompose(A):
    H1, H2 = hermitian_parts(A)
    assert is_hermitian(H1) and is_hermitian(H2)
    assert np.linalg.norm(H1 + 1j * H2 - A) <= 1e-14 * max(np.linalg.norm(A), 1)


def test_is_scalar():
    assert is_scalar(3 * np.eye(2), 1e-12)
    assert not is_scalar(E11, 1e-12)
    assert is_scalar(np.zeros((2, 2)), 0.0)


def test_essential_direction_examples():
    assert essential_hermitian_direction(np.diag([2.0, -1.0])) == pytest.approx(1.0)
    alpha = essential_hermitian_direction(np.diag([1 + 1j, 1 - 1j]))
    assert alpha == pytest.approx(1j)
    assert is_hermitian(alpha * (np.diag([1 + 1j, 1 - 1j]) - np.eye(2)))
    assert essential_hermitian_direction(E12) is None
    assert essential_hermitian_direction(5 * np.eye(3)) == 1


@given(matrices)
def test_essential_direction_convention_on_hermitian(A):
    H = A + A.conj().T
    if is_scalar(H):
        return
    alpha = essential_hermitian_direction(H)
    assert alpha is not None
    assert 0 <= np.angle(alpha) < np.pi
    assert is_hermitian(alpha * H)


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
@settings(max_examples=50)
def test_haar_unitarity(seed, n):
    U = haar_unitary(n, seed)
    assert np.linalg.norm(U.conj().T @ U - np.eye(n)) <= 1e-12


def test_haar_scalar_case():
    u = haar_unitary(1, 5)
    assert abs(abs(u[0, 0]) - 1) <= 1e-12


def test_haar_mean_u11():
    # oracle: E|U11|^2 = 1/n for Haar unitaries
    U = haar_unitaries(3, 100000, 11)
    assert np.mean(np.abs(U[:, 0, 0]) ** 2) == pytest.approx(1 / 3, abs=0.01)


def test_haar_phase_uniform():
    # without the column phase fix the diagonal phases are biased toward 0
    U = haar_unitaries(2, 50000, 3)
    assert abs(np.mean(U[:, 0, 0])) < 0.02


def test_seed_determinism():
    a = haar_unitaries(3, 100, Seed(7, 2))
    b = haar_unitaries(3, 100, Seed(7, 2))
    c = haar_unitaries(3, 100, Seed(7, 3))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert Seed(7).spawn(4) == Seed(7, 4)


def test_haar_chunking_stable():
    assert np.array_equal(haar_unitaries(2, 1000, 9, chunk=64), haar_unitaries(2, 1000, 9))


def test_eigenvalues_examples():
    s = eigenvalues(np.diag([3.0, -1.0]), hermitian_hint=True)
    assert s.hermitian_flag and np.allclose(s.values, [3, -1])
    assert np.allclose(eigenvalues(np.eye(4), True).values, 1)
    assert np.allclose(eigenvalues(np.array([[0, 2], [0, 0]])).values, 0)


@given(matrices)
def test_spectrum_trace(A):
    s = eigenvalues(A)
    assert abs(np.sum(s.values) - np.trace(A)) <= 1e-10 * (1 + abs(np.trace(A)))
    H = A + A.conj().T
    sh = eigenvalues(H, hermitian_hint=True)
    assert np.all(np.diff(sh.values.real) <= 0)
    assert np.all(np.abs(sh.values.imag) <= 1e-12)


def test_eigenvalues_rejects_bad_hint():
    with pytest.raises(ValueError):
        eigenvalues(E12, hermitian_hint=True)


def test_c_value_examples():
    A = np.diag([1 + 1j, 1 - 1j])
    assert c_value(E11, A, np.eye(2)) == pytest.approx(1 + 1j)
    assert c_value(E11, A, np.array([[0, 1], [1, 0]])) == pytest.approx(1 - 1j)
    U = haar_unitary(2, 1)
    assert c_value(np.eye(2), np.diag([0, 2]), U) == pytest.approx(2)


def test_c_value_errors():
    with pytest.raises(ValueError):
        c_value(E11, np.eye(3), np.eye(2))
    with pytest.raises(ValueError):
        c_value(E11, E11, np.array([[1, 1], [0, 1]]))


def test_c_values_batch_matches_loop():
    rng = np.random.default_rng(0)
    C, A = rand_matrix(rng, 3), rand_matrix(rng, 3)
    U = haar_unitaries(3, 20, 1)
    direct = [np.trace(C @ u.conj().T @ A @ u) for u in U]
    assert np.allclose(c_values(C, A, U), direct, atol=1e-13)


def test_normality():
    assert is_normal(np.diag([1j, 2]))
    assert not is_normal(E12)


def test_matrix_json_roundtrip():
    A = np.array([[1 + 2j, -0.5], [3j, 4]])
    obj = json.loads(json.dumps(matrix_to_json(A)))
    assert obj["n"] == 2
    assert np.array_equal(matrix_from_json(obj), A)
    with pytest.raises(ValueError):
        matrix_from_json({"n": 3, "re": [[1, 0], [0, 1]]})
    with pytest.raises(ValueError):
        matrix_from_json({"re": [[1]]})
