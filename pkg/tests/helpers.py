"""Independent reference constructions used as test oracles."""
import numpy as np


def sigma():
    return np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def haar_su2(rng):
    """Random SU(2) element from a uniform unit quaternion (independent of the library sampler)."""
    q = rng.standard_normal(4)
    q /= np.linalg.norm(q)
    a, b = q[0] + 1j * q[1], q[2] + 1j * q[3]
    return np.array([[a, -np.conj(b)], [b, np.conj(a)]])


def random_skew(rng, n, traceless=True):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    X = 0.5 * (A - A.conj().T)
    if traceless:
        X -= np.trace(X) / n * np.eye(n)
    return X
