"""Small dense linear-algebra helpers backed by LAPACK through numpy/scipy."""
import numpy as np
import scipy.linalg

from .exceptions import NotPositiveDefinite, NotSymmetric, RankDeficient

RANK_RTOL = 1e-12


def null_space_basis(M):
    """Orthonormal basis of the orthogonal complement of ``range(M)``.

    Parameters
    ----------
    M : ndarray, shape (p, m)
        Full column rank, ``p > m``.

    Returns
    -------
    N : ndarray, shape (p, p - m)
        ``N.T @ N = I`` and ``M.T @ N = 0``.
    """
    M = np.asarray(M, dtype=float)
    p, m = M.shape
    U, sv, _ = np.linalg.svd(M, full_matrices=True)
    if m and (sv[-1] <= RANK_RTOL * sv[0] or sv[0] == 0.0):
        raise RankDeficient(f"matrix of shape {M.shape} has numerical rank < {m}")
    return U[:, m:]


def _check_symmetric(H):
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {H.shape}")
    scale = max(1.0, float(np.abs(H).max(initial=0.0)))
    if np.abs(H - H.T).max(initial=0.0) > 1e-12 * scale:
        raise NotSymmetric("matrix is not symmetric")
    return 0.5 * (H + H.T)


def symmetric_eigendecomposition(H):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix."""
    return np.linalg.eigh(_check_symmetric(H))


def solve_shifted(H, shift, rhs):
    """Solve ``(H + shift * I) s = rhs`` for a positive definite shifted matrix."""
    H = _check_symmetric(H)
    K = H + shift * np.eye(H.shape[0])
    lam_min = np.linalg.eigvalsh(K)[0] if K.size else 1.0
    if lam_min <= 0.0:
        raise NotPositiveDefinite(f"smallest eigenvalue of H + shift*I is {lam_min:.3e}")
    return scipy.linalg.cho_solve(scipy.linalg.cho_factor(K), np.asarray(rhs, dtype=float))


def least_squares(M, b):
    """Minimum-norm least-squares solution of ``M w ~= b``."""
    return np.linalg.lstsq(np.asarray(M, dtype=float), np.asarray(b, dtype=float), rcond=None)[0]
