"""Compact matrix Lie groups SU(n) and U(n).

Group elements are plain ``(n, n)`` complex arrays and Lie algebra elements
are skew-Hermitian arrays.  The Ad-invariant product on the algebra is
``inner(X, Y) = -scale * Re tr(XY)``.  Most functions broadcast over leading
batch axes.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg
from scipy.stats import unitary_group

from .errors import NotTangent, OutOfBall

TAU_UNITARY = 1e-9
DEFAULT_LOG_RADIUS = np.pi - 0.1

_FAMILIES = {"SU": "special-unitary", "U": "unitary"}
_SPEC_RE = re.compile(r"^\s*(SU|U)\s*\(\s*(\d+)\s*\)\s*$", re.IGNORECASE)


def dagger(m):
    return np.swapaxes(np.conj(m), -1, -2)


@dataclass(frozen=True)
class GroupSpec:
    """A compact matrix group together with the normalisation of its inner product."""

    family: str = "special-unitary"
    n: int = 2
    scale: float = 1.0

    def __post_init__(self):
        if self.family not in _FAMILIES.values():
            raise ValueError(f"unknown group family {self.family!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("matrix size n must be a positive integer")
        if not self.scale > 0:
            raise ValueError("inner product scale must be positive")

    @classmethod
    def parse(cls, text: str, scale: float = 1.0) -> "GroupSpec":
        m = _SPEC_RE.match(text)
        if m is None:
            raise ValueError(f"cannot parse group spec {text!r}; expected e.g. 'SU(2)' or 'U(3)'")
        return cls(_FAMILIES[m.group(1).upper()], int(m.group(2)), scale)

    def __str__(self):
        prefix = "SU" if self.special else "U"
        return f"{prefix}({self.n})"

    @property
    def special(self) -> bool:
        return self.family == "special-unitary"

    @property
    def dim(self) -> int:
        return self.n * self.n - 1 if self.special else self.n * self.n

    @property
    def is_su2(self) -> bool:
        return self.special and self.n == 2

    @cached_property
    def basis(self) -> np.ndarray:
        """Orthonormal basis of the Lie algebra, shape ``(dim, n, n)``.

        Built from generalised Gell-Mann matrices, so for SU(2) the elements are
        positive multiples of ``-(i/2) sigma_k``.
        """
        n = self.n
        herm = []
        for j in range(n):
            for k in range(j + 1, n):
                s = np.zeros((n, n), complex)
                s[j, k] = s[k, j] = 1
                a = np.zeros((n, n), complex)
                a[j, k], a[k, j] = -1j, 1j
                herm += [s, a]
        for l in range(1, n):
            d = np.zeros((n, n), complex)
            d[np.arange(l), np.arange(l)] = 1
            d[l, l] = -l
            herm.append(d * np.sqrt(2.0 / (l * (l + 1))))
        out = [-1j * h / np.sqrt(2 * self.scale) for h in herm]
        if not self.special:
            out.append(-1j * np.eye(n) / np.sqrt(n * self.scale))
        return np.array(out).reshape(self.dim, n, n)

    def identity(self) -> np.ndarray:
        return np.eye(self.n, dtype=complex)

    def center(self) -> list[np.ndarray]:
        """A finite set of central elements: the full centre for SU(n), {I, -I} for U(n)."""
        if self.special:
            return [np.exp(2j * np.pi * k / self.n) * self.identity() for k in range(self.n)]
        return [self.identity(), -self.identity()]

    def random(self, rng: np.random.Generator) -> np.ndarray:
        """Haar-random element."""
        if self.n == 1:
            u = np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
        else:
            u = unitary_group.rvs(self.n, random_state=rng)
        if self.special:
            u = u / np.linalg.det(u) ** (1.0 / self.n)
        return u

    def random_algebra(self, rng: np.random.Generator, size=None) -> np.ndarray:
        shape = (self.dim,) if size is None else (size, self.dim)
        return self.from_coords(rng.standard_normal(shape))

    def coords(self, X) -> np.ndarray:
        """Coordinates of algebra element(s) in the orthonormal basis."""
        return -self.scale * np.real(np.einsum("aij,...ji->...a", self.basis, X))

    def from_coords(self, c) -> np.ndarray:
        return np.einsum("...a,aij->...ij", np.asarray(c, dtype=float), self.basis)

    def project_algebra(self, X) -> np.ndarray:
        """Orthogonal projection of an arbitrary matrix onto the Lie algebra."""
        return self.from_coords(self.coords(0.5 * (X - dagger(X))))

    def ad_matrix(self, u) -> np.ndarray:
        """Matrix of Ad(u) in the orthonormal basis (real orthogonal)."""
        return self.coords(u @ self.basis @ dagger(u)).T

    def is_element(self, u, tol=TAU_UNITARY) -> bool:
        u = np.asarray(u)
        if u.shape != (self.n, self.n):
            return False
        if np.linalg.norm(dagger(u) @ u - np.eye(self.n)) > tol:
            return False
        return not self.special or abs(np.linalg.det(u) - 1) <= tol

    def is_algebra(self, X, tol=TAU_UNITARY) -> bool:
        X = np.asarray(X)
        if X.shape != (self.n, self.n) or np.linalg.norm(X + dagger(X)) > tol:
            return False
        return not self.special or abs(np.trace(X)) <= tol

    def project(self, u) -> np.ndarray:
        """Nearest group element: polar factor, then determinant fix for SU(n)."""
        return polar(u, special=self.special)


def polar(u, special=False):
    w, _, vh = np.linalg.svd(u)
    p = w @ vh
    if special:
        n = p.shape[-1]
        p = p / (np.linalg.det(p) ** (1.0 / n))[..., None, None]
    return p


def exp(X) -> np.ndarray:
    """Matrix exponential; exact identity for ``X = 0``."""
    X = np.asarray(X, dtype=complex)
    if not X.any():
        return np.broadcast_to(np.eye(X.shape[-1], dtype=complex), X.shape).copy()
    return scipy.linalg.expm(X)


def exp_frechet(Z, E):
    """``exp(Z)`` and its directional derivatives along each ``E[k]``.

    Uses the block-triangular identity
    ``exp([[Z, E], [0, Z]]) = [[exp Z, D exp_Z(E)], [0, exp Z]]``.
    """
    Z = np.asarray(Z, dtype=complex)
    E = np.asarray(E, dtype=complex)
    n = Z.shape[-1]
    k = E.shape[0]
    if k == 0:
        return exp(Z), np.zeros((0, n, n), complex)
    block = np.zeros((k, 2 * n, 2 * n), complex)
    block[:, :n, :n] = Z
    block[:, n:, n:] = Z
    block[:, :n, n:] = E
    big = scipy.linalg.expm(block)
    return big[0, :n, :n], big[:, :n, n:]


def log(u, radius: float = DEFAULT_LOG_RADIUS, special: bool | None = None) -> np.ndarray:
    """Principal logarithm of a unitary matrix.

    Raises :class:`OutOfBall` if some eigenvalue phase has magnitude ``>= radius``
    or, for ``special=True``, if the principal phases do not sum to zero.
    """
    u = np.asarray(u, dtype=complex)
    n = u.shape[-1]
    if np.array_equal(u, np.eye(n)):
        return np.zeros((n, n), complex)
    # complex Schur form of a normal matrix is diagonal up to roundoff
    t, z = scipy.linalg.schur(u, output="complex")
    phases = np.angle(np.diag(t))
    worst = np.max(np.abs(phases))
    if worst >= radius:
        raise OutOfBall(worst, radius)
    if special is None:
        special = abs(np.linalg.det(u) - 1) < 1e-6
    if special and abs(phases.sum()) > 1e-8:
        raise OutOfBall(worst, radius)
    X = (z * (1j * phases)) @ dagger(z)
    X = 0.5 * (X - dagger(X))
    if special:
        X = X - np.trace(X) / n * np.eye(n)
    return X


def log_phase(u) -> float:
    """Largest eigenvalue phase magnitude of a unitary matrix."""
    ev = np.linalg.eigvals(u)
    return float(np.max(np.abs(np.angle(ev))))


def inner(X, Y, scale: float = 1.0):
    return -scale * np.real(np.einsum("...ij,...ji->...", X, Y))


def inner_gram(A, B, scale: float = 1.0) -> np.ndarray:
    """Matrix ``G[k, m] = inner(A[k], B[m])`` for stacks of algebra elements."""
    return -scale * np.real(np.einsum("kij,mji->km", A, B))


def bracket(X, Y):
    return X @ Y - Y @ X


def Ad(u, X):
    return u @ X @ dagger(u)


def cartan3(X, Y, Z, scale: float = 1.0):
    """The bi-invariant 3-form ``(X | [Y, Z]) / 2``."""
    return 0.5 * inner(X, bracket(Y, Z), scale)


def cartan3_tensor(L, scale: float = 1.0) -> np.ndarray:
    """``T[i, j, k] = cartan3(L[i], L[j], L[k])`` for a stack ``L``."""
    LL = np.einsum("jab,kbc->jkac", L, L)
    br = LL - np.swapaxes(LL, 0, 1)
    return -0.5 * scale * np.real(np.einsum("iab,jkba->ijk", L, br))


def _check_tangent(u, xi, tol):
    v = dagger(u) @ xi
    if np.linalg.norm(v + dagger(v)) > tol * max(1.0, np.linalg.norm(xi)):
        raise NotTangent("u^{-1} xi is not skew-Hermitian")


def maurer_left(u, xi, tol: float = TAU_UNITARY):
    """Left Maurer-Cartan form ``u^{-1} xi``."""
    _check_tangent(u, xi, tol)
    return dagger(u) @ xi


def maurer_right(u, xi, tol: float = TAU_UNITARY):
    """Right Maurer-Cartan form ``xi u^{-1}``."""
    _check_tangent(u, xi, tol)
    return xi @ dagger(u)


def su2_element(theta: float) -> np.ndarray:
    """``diag(e^{i theta}, e^{-i theta})``."""
    return np.diag([np.exp(1j * theta), np.exp(-1j * theta)])


def pauli_basis() -> np.ndarray:
    """``e_k = -(i/2) sigma_k``; these satisfy ``[e_1, e_2] = e_3``."""
    s = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)
    return -0.5j * s
