"""Dense linear-algebra helpers shared by the rest of the package.

Everything here is a thin, validated wrapper around LAPACK (via numpy) with
the ordering conventions the other modules rely on: eigenvalues and singular
values are always returned in descending order.
"""

from __future__ import annotations

import numpy as np


def as_real_matrix(m, square: bool = False) -> np.ndarray:
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.size == 0:
        raise ValueError("expected a non-empty 2-d matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if square and a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def symmetrize(m) -> np.ndarray:
    """Return ``(M + M^T) / 2`` so the result is symmetric bit-for-bit."""
    a = as_real_matrix(m, square=True)
    return 0.5 * (a + a.T)


def sym_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix.

    Returns ``(w, V)`` with ``w`` sorted descending and the matching
    orthonormal eigenvectors in the columns of ``V``.  The input is
    symmetrized first, so tiny asymmetries from floating arithmetic are
    harmless.
    """
    a = symmetrize(m)
    w, v = np.linalg.eigh(a)
    return w[::-1].copy(), v[:, ::-1].copy()


def eigvalsh_desc(m) -> np.ndarray:
    return np.linalg.eigvalsh(symmetrize(m))[::-1].copy()


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``M = U diag(s) V^T`` with ``s`` descending.

    Returns ``(U, s, V)`` -- note ``V`` rather than ``V^T``, so the right
    singular vectors are its columns like the left ones are in ``U``.
    """
    a = as_real_matrix(m)
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    return u, s, vt.T


def operator_norm(m) -> float:
    a = as_real_matrix(m)
    return float(np.linalg.norm(a, 2))


def spectral_radius(m) -> float:
    """Largest eigenvalue modulus of a square (not necessarily symmetric) matrix."""
    a = as_real_matrix(m, square=True)
    if np.array_equal(a, a.T):
        return float(np.max(np.abs(np.linalg.eigvalsh(a))))
    return float(np.max(np.abs(np.linalg.eigvals(a))))


def is_psd(m, tol: float = 1e-9) -> bool:
    """True iff the smallest eigenvalue is at least ``-tol * max(1, ||M||)``."""
    a = symmetrize(m)
    w = np.linalg.eigvalsh(a)
    scale = max(1.0, float(np.max(np.abs(w))))
    return bool(w[0] >= -tol * scale)


def min_eig(m) -> float:
    return float(np.linalg.eigvalsh(symmetrize(m))[0])


def max_eig(m) -> float:
    return float(np.linalg.eigvalsh(symmetrize(m))[-1])
