"""Dense complex linear algebra on numpy arrays.

Matrices are plain ``complex128`` ndarrays.  Decompositions default to the
LAPACK drivers shipped with numpy; the cyclic Jacobi solvers in this module
(``method="jacobi"``) are self-contained alternatives used to cross-check
them.
"""
import os
from typing import NamedTuple

import numpy as np

from .errors import ContractError, DimensionLimitError, NumericError, ShapeError

STRUCTURAL_TOL = 1e-10
RANK_TOL = 1e-8
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100

DEFAULT_MAX_QUBITS = 24
MAX_QUBITS_ENV = "QMIP_MAX_QUBITS"


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


class SingularValueDecomposition(NamedTuple):
    left: np.ndarray
    singulars: np.ndarray
    right: np.ndarray

    def reconstruct(self):
        return (self.left * self.singulars) @ self.right.conj().T


def max_qubits():
    """Qubit cap for any single system; overridable through ``QMIP_MAX_QUBITS``."""
    value = os.environ.get(MAX_QUBITS_ENV)
    return int(value) if value else DEFAULT_MAX_QUBITS


def check_dimension(dim):
    """Raise DimensionLimitError when ``dim`` exceeds ``2**max_qubits()``."""
    cap = max_qubits()
    if dim > 2 ** cap:
        raise DimensionLimitError(
            f"dimension {dim} exceeds the cap of 2^{cap} (set {MAX_QUBITS_ENV} to raise it)"
        )


def as_matrix(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ContractError("matrix has non-finite entries")
    return a


def tensor_product(a, b):
    a, b = as_matrix(a), as_matrix(b)
    check_dimension(max(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]))
    return np.kron(a, b)


def multiply(a, b):
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(a):
    return as_matrix(a).conj().T


def is_hermitian(a, tol=STRUCTURAL_TOL):
    a = as_matrix(a)
    return a.shape[0] == a.shape[1] and np.max(np.abs(a - a.conj().T), initial=0.0) <= tol


def is_unitary(a, tol=STRUCTURAL_TOL):
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"unitarity is defined for square matrices, got {a.shape}")
    gap = a @ a.conj().T - np.eye(a.shape[0])
    return bool(np.max(np.abs(gap), initial=0.0) <= tol)


def normalize_phase(vectors, cutoff=1e-9):
    """Rotate each column so its first entry above ``cutoff`` is real positive."""
    v = np.array(vectors, dtype=complex, copy=True)
    single = v.ndim == 1
    if single:
        v = v[:, None]
    for col in range(v.shape[1]):
        big = np.flatnonzero(np.abs(v[:, col]) > cutoff)
        if big.size:
            z = v[big[0], col]
            v[:, col] *= abs(z) / z
    return v[:, 0] if single else v


def _sort_descending(values, vectors):
    order = np.argsort(-values, kind="stable")
    return values[order], vectors[:, order]


def jacobi_eigh(a, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Cyclic two-sided Jacobi diagonalisation of a Hermitian matrix.

    Each pivot (p, q) is first made real by a diagonal phase and then
    annihilated by a real plane rotation.  Sweeps stop once the off-diagonal
    Frobenius mass falls below ``tol`` times the matrix norm.
    """
    a = np.array(as_matrix(a), copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(np.linalg.norm(a), np.finfo(float).tiny)
    for sweep in range(1, max_sweeps + 1):
        off = np.sqrt(max(np.linalg.norm(a) ** 2 - np.sum(np.abs(np.diag(a)) ** 2), 0.0))
        if off <= tol * scale:
            return np.real(np.diag(a)).copy(), v, sweep - 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= 1e-300:
                    continue
                phase = apq / r
                theta = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]] on columns p, q
                g_pp, g_pq = c, s
                g_qp, g_qq = -s * np.conj(phase), c * np.conj(phase)
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = col_p * g_pp + col_q * g_qp
                a[:, q] = col_p * g_pq + col_q * g_qq
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = np.conj(g_pp) * row_p + np.conj(g_qp) * row_q
                a[q, :] = np.conj(g_pq) * row_p + np.conj(g_qq) * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = vp * g_pp + vq * g_qp
                v[:, q] = vp * g_pq + vq * g_qq
    raise NumericError(f"Jacobi diagonalisation did not converge in {max_sweeps} sweeps",
                       iterations=max_sweeps)


def hermitian_eig(a, tol=STRUCTURAL_TOL, method="lapack"):
    """Eigenvalues (descending) and orthonormal eigenvectors of a Hermitian matrix."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"hermitian_eig needs a square matrix, got {a.shape}")
    if not is_hermitian(a, tol):
        raise ContractError("matrix is not Hermitian within tolerance")
    a = 0.5 * (a + a.conj().T)
    if method == "jacobi":
        values, vectors, _ = jacobi_eigh(a)
    elif method == "lapack":
        values, vectors = np.linalg.eigh(a)
    else:
        raise ValueError(f"unknown method {method!r}")
    values, vectors = _sort_descending(values, vectors)
    return EigenDecomposition(values, normalize_phase(vectors))


def jacobi_svd(a, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """One-sided (Hestenes) Jacobi SVD: orthogonalise the columns pairwise."""
    a = as_matrix(a)
    transpose = a.shape[0] < a.shape[1]
    w = np.array(a.conj().T if transpose else a, copy=True)
    n = w.shape[1]
    v = np.eye(n, dtype=complex)
    for sweep in range(1, max_sweeps + 1):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = np.vdot(w[:, p], w[:, p]).real
                beta = np.vdot(w[:, q], w[:, q]).real
                gamma = np.vdot(w[:, p], w[:, q])
                g = abs(gamma)
                if g <= tol * np.sqrt(alpha * beta) or g <= 1e-300:
                    continue
                rotated = True
                phase = gamma / g
                zeta = (beta - alpha) / (2.0 * g)
                t = 1.0 / (abs(zeta) + np.sqrt(zeta * zeta + 1.0))
                if zeta < 0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                g_pp, g_pq = c, s
                g_qp, g_qq = -s * np.conj(phase), c * np.conj(phase)
                wp, wq = w[:, p].copy(), w[:, q].copy()
                w[:, p] = wp * g_pp + wq * g_qp
                w[:, q] = wp * g_pq + wq * g_qq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = vp * g_pp + vq * g_qp
                v[:, q] = vp * g_pq + vq * g_qq
        if not rotated:
            break
    else:
        raise NumericError(f"Jacobi SVD did not converge in {max_sweeps} sweeps",
                           iterations=max_sweeps)
    singulars = np.linalg.norm(w, axis=0)
    order = np.argsort(-singulars, kind="stable")
    singulars, w, v = singulars[order], w[:, order], v[:, order]
    left = np.zeros_like(w)
    for col, s in enumerate(singulars):
        if s > 1e-300:
            left[:, col] = w[:, col] / s
    left = _complete_columns(left, singulars > 1e-300)
    if transpose:
        return SingularValueDecomposition(v, singulars, left)
    return SingularValueDecomposition(left, singulars, v)


def _complete_columns(q, filled):
    """Replace unfilled columns of ``q`` with an orthonormal completion."""
    if np.all(filled):
        return q
    basis = q[:, filled]
    for col in np.flatnonzero(~filled):
        for e in range(q.shape[0]):
            cand = np.zeros(q.shape[0], dtype=complex)
            cand[e] = 1.0
            cand -= basis @ (basis.conj().T @ cand)
            cand -= basis @ (basis.conj().T @ cand)
            norm = np.linalg.norm(cand)
            if norm > 1e-6:
                q[:, col] = cand / norm
                basis = np.column_stack([basis, q[:, col]])
                break
    return q


def svd(a, method="lapack"):
    """Thin SVD with singular values descending; ``right`` holds V, not V^dagger."""
    a = as_matrix(a)
    if method == "jacobi":
        return jacobi_svd(a)
    if method != "lapack":
        raise ValueError(f"unknown method {method!r}")
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD did not converge: {exc}") from exc
    return SingularValueDecomposition(u, s, vh.conj().T)


def operator_norm(a):
    """Largest singular value, i.e. sup ||A x|| / ||x||."""
    a = as_matrix(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def hermitian_operator_norm(a):
    a = as_matrix(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (a + a.conj().T)))))


def polar_unitary(a):
    """Unitary factor W of the polar decomposition a = W P."""
    u, _, vh = np.linalg.svd(as_matrix(a))
    return u @ vh


def random_unitary(dim, rng):
    """Haar-distributed unitary: QR of a complex Gaussian with phase-fixed R diagonal."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(dim, rng):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (z + z.conj().T)
