import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmip import linalg
from qmip.errors import ContractError, DimensionLimitError, ShapeError


def test_tensor_identity_and_diagonal():
    assert np.array_equal(linalg.tensor_product(np.eye(2), np.eye(2)), np.eye(4))
    out = linalg.tensor_product(np.diag([1, 2]), np.diag([1, 3]))
    assert np.array_equal(out, np.diag([1, 3, 2, 6]))


def test_tensor_acts_factorwise(rng):
    a, b = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
    x, y = rng.standard_normal(2), rng.standard_normal(2)
    lhs = linalg.tensor_product(a, b) @ np.kron(x, y)
    assert np.allclose(lhs, np.kron(a @ x, b @ y), atol=1e-12)


def test_tensor_dimension_cap(monkeypatch):
    monkeypatch.setenv(linalg.MAX_QUBITS_ENV, "3")
    with pytest.raises(DimensionLimitError):
        linalg.tensor_product(np.eye(4), np.eye(4))


def test_multiply(rng):
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.allclose(linalg.multiply(np.eye(3), a), a)
    naive = np.zeros((3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                naive[i, j] += a[i, k] * b[k, j]
    assert np.allclose(linalg.multiply(a, b), naive, atol=1e-12)
    u = linalg.random_unitary(4, rng)
    assert np.allclose(linalg.multiply(u, linalg.adjoint(u)), np.eye(4), atol=1e-12)
    with pytest.raises(ShapeError):
        linalg.multiply(np.eye(2), np.eye(3))


def test_adjoint(rng):
    assert np.array_equal(linalg.adjoint(np.eye(3)), np.eye(3))
    a = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    assert np.array_equal(linalg.adjoint(linalg.adjoint(a)), a)
    assert np.array_equal(linalg.adjoint([[0, 1], [1j, 0]]), np.array([[0, -1j], [1, 0]]))


def test_as_matrix_rejects_nonfinite():
    with pytest.raises(ContractError):
        linalg.as_matrix([[np.nan, 0], [0, 1]])
    with pytest.raises(ShapeError):
        linalg.as_matrix([1, 2])


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_hermitian_eig_examples(method):
    dec = linalg.hermitian_eig(np.diag([3.0, 1.0, 2.0]), method=method)
    assert np.allclose(dec.eigenvalues, [3, 2, 1])
    assert np.allclose(np.abs(dec.eigenvectors), np.eye(3)[:, [0, 2, 1]])
    dec = linalg.hermitian_eig(0.5 * np.ones((2, 2)), method=method)
    assert np.allclose(dec.eigenvalues, [1, 0], atol=1e-14)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_hermitian_eig_reconstruction(rng, method):
    a = linalg.random_hermitian(8, rng)
    vals, vecs = linalg.hermitian_eig(a, method=method)
    assert np.all(np.diff(vals) <= 0)
    assert np.max(np.abs((vecs * vals) @ vecs.conj().T - a)) < 1e-10
    assert np.allclose(vecs.conj().T @ vecs, np.eye(8), atol=1e-10)
    assert abs(vals.sum() - np.trace(a).real) < 1e-10


def test_jacobi_matches_lapack(rng):
    a = linalg.random_hermitian(12, rng)
    lj = linalg.hermitian_eig(a, method="jacobi").eigenvalues
    ll = linalg.hermitian_eig(a).eigenvalues
    assert np.allclose(lj, ll, atol=1e-11)


def test_hermitian_eig_errors():
    with pytest.raises(ContractError):
        linalg.hermitian_eig(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ShapeError):
        linalg.hermitian_eig(np.zeros((2, 3)))


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_svd_examples(rng, method):
    assert np.allclose(linalg.svd(np.eye(4), method=method).singulars, 1)
    u = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
    s = linalg.svd(np.outer(u, v.conj()), method=method).singulars
    assert np.allclose(s, [1, 0, 0], atol=1e-12)
    a = rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))
    dec = linalg.svd(a, method=method)
    eig = linalg.hermitian_eig(a @ a.conj().T).eigenvalues
    assert np.allclose(dec.singulars ** 2, eig, atol=1e-10)
    assert np.max(np.abs(dec.reconstruct() - a)) < 1e-10


def test_operator_norm(rng):
    assert linalg.operator_norm(np.eye(3)) == pytest.approx(1.0)
    assert linalg.operator_norm(np.diag([2, 1])) == pytest.approx(2.0)
    a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    probes = rng.standard_normal((5, 10_000)) + 1j * rng.standard_normal((5, 10_000))
    probes /= np.linalg.norm(probes, axis=0)
    lower = np.max(np.linalg.norm(a @ probes, axis=0))
    norm = linalg.operator_norm(a)
    assert lower <= norm + 1e-12
    assert norm - lower < 0.35 * norm


def test_is_unitary(rng):
    assert linalg.is_unitary(np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    assert not linalg.is_unitary(np.diag([1, 2]))
    u = np.eye(4)
    for _ in range(5):
        u = u @ linalg.random_unitary(4, rng)
    assert linalg.is_unitary(u, 1e-10)
    with pytest.raises(ShapeError):
        linalg.is_unitary(np.zeros((2, 3)))


def test_normalize_phase():
    v = np.array([0.0, -1j, 1.0]) / np.sqrt(2)
    out = linalg.normalize_phase(v)
    assert out[1].real > 0 and abs(out[1].imag) < 1e-15


dims = st.integers(min_value=2, max_value=4)


@given(st.integers(0, 2 ** 32 - 1), dims, dims)
def test_mixed_product_property(seed, d1, d2):
    rng = np.random.default_rng(seed)
    a, c = (rng.standard_normal((d1, d1)) + 1j * rng.standard_normal((d1, d1)) for _ in range(2))
    b, d = (rng.standard_normal((d2, d2)) + 1j * rng.standard_normal((d2, d2)) for _ in range(2))
    lhs = linalg.tensor_product(a, b) @ linalg.tensor_product(c, d)
    assert np.max(np.abs(lhs - np.kron(a @ c, b @ d))) < 1e-12 * max(1, np.abs(lhs).max())


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 64), st.integers(1, 64))
def test_svd_roundtrip_property(seed, r, c):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c))
    dec = linalg.svd(a)
    assert np.max(np.abs(dec.reconstruct() - a)) < 1e-10 * max(1, np.abs(a).max())
    assert np.all(np.diff(dec.singulars) <= 1e-12) and np.all(dec.singulars >= 0)


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 16))
def test_unitary_norm_and_density_spectrum(seed, d):
    rng = np.random.default_rng(seed)
    u = linalg.random_unitary(d, rng)
    assert linalg.is_unitary(u)
    assert abs(linalg.operator_norm(u) - 1) < 1e-10
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    vals = linalg.hermitian_eig(rho).eigenvalues
    assert vals.min() >= -1e-10 and abs(vals.sum() - 1) < 1e-10
