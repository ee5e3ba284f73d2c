"""SVD-based subspace utilities shared by the verifier and the stratifier.

All subspaces are stored as column matrices.  A singular value counts as zero
when it falls below ``rtol * sigma_max``; when every singular value is below
``ABS_FLOOR`` the whole map is treated as zero.
"""
import numpy as np
import scipy.linalg

ABS_FLOOR = 1e-13


def _threshold(s, rtol):
    if s.size == 0 or s[0] < ABS_FLOOR:
        return np.inf
    return rtol * s[0]


def null_space(A, rtol=1e-9):
    """Orthonormal basis (columns) of the kernel of ``A``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m, n = A.shape
    if n == 0:
        return np.zeros((0, 0))
    if m == 0:
        return np.eye(n)
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    cut = _threshold(s, rtol)
    rank = int(np.sum(s >= cut))
    return vh[rank:].conj().T


def rank(A, rtol=1e-9):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s >= _threshold(s, rtol)))


def orth(A, rtol=1e-9):
    """Orthonormal basis (columns) of the column space of ``A``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return np.zeros((A.shape[0], 0))
    u, s, _ = np.linalg.svd(A, full_matrices=False)
    r = int(np.sum(s >= _threshold(s, rtol)))
    return u[:, :r]


def complement(A, ambient_dim):
    """Orthonormal basis of the orthogonal complement of col(A) in R^ambient_dim."""
    if A.shape[1] == 0:
        return np.eye(ambient_dim)
    return null_space(A.T)


def intersect(A, B, rtol=1e-9):
    """Orthonormal basis of col(A) ∩ col(B)."""
    QA, QB = orth(A, rtol), orth(B, rtol)
    if QA.shape[1] == 0 or QB.shape[1] == 0:
        return np.zeros((QA.shape[0], 0))
    coeffs = null_space(np.hstack([QA, -QB]), rtol)
    return orth(QA @ coeffs[: QA.shape[1]], rtol)


def restrict_complement(sub, within):
    """Orthonormal basis of the complement of col(sub) inside col(within).

    ``within`` must be orthonormal and contain ``sub``.
    """
    if within.shape[1] == 0:
        return within
    if sub.shape[1] == 0:
        return within
    c = within.T @ sub
    return within @ null_space(c.T)


def max_principal_angle(A, B):
    """Largest principal angle between col(A) and col(B); pi/2 if the dimensions differ."""
    da, db = A.shape[1], B.shape[1]
    if da != db:
        return np.pi / 2
    if da == 0:
        return 0.0
    return float(np.max(scipy.linalg.subspace_angles(A, B)))
