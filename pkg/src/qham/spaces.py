"""Quasi-Hamiltonian spaces over compact matrix groups.

A point of every space here is a tuple of ``(n, n)`` unitary matrices (its
*components*); the group acts on each component by conjugation.  Tangent data
is handled in batches: a *frame* is a tuple with one ``(k, n, n)`` array per
component, holding ``k`` ambient tangent vectors.  Two-forms are evaluated on
frames, returning ``(k, m)`` matrices.

Wedge convention for algebra-valued one-forms::

    (alpha ^ beta)(v, w) = (alpha(v) | beta(w)) - (alpha(w) | beta(v))
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import linalg
from .errors import DegenerateClass, EmptySurface, GroupMismatch
from .lie import Ad, GroupSpec, dagger, exp, exp_frechet, inner, inner_gram, su2_element


@dataclass(eq=False)
class TangentVector:
    """Tangent vector at ``point``: ambient matrices and (optionally) chart velocity."""

    point: tuple
    ambient: tuple
    velocity: np.ndarray | None = None


def wedge(scale, aV, bV, aW, bW):
    """Batched ``(alpha ^ beta)(V, W)`` given the values of alpha and beta on both frames."""
    return inner_gram(aV, bW, scale) - inner_gram(aW, bV, scale).T


def frame_from_vectors(vectors):
    """Stack a list of :class:`TangentVector` into a frame."""
    ncomp = len(vectors[0].ambient)
    return tuple(np.stack([v.ambient[c] for v in vectors]) for c in range(ncomp))


def frame_len(frame):
    return frame[0].shape[0]


class QHamSpace:
    """Common interface of the concrete spaces.

    Subclasses implement ``chart``, ``chart_frame``, ``mu``, ``dmu``,
    ``omega_matrix``, ``random_point`` and ``fixture_points``.
    """

    group: GroupSpec
    dim: int
    n_components: int

    # -- to implement --------------------------------------------------
    def chart(self, x, z):
        raise NotImplementedError

    def chart_frame(self, x, z):
        """Partial derivatives of ``chart(x, .)`` at ``z``, as a frame of length ``dim``."""
        raise NotImplementedError

    def mu(self, x) -> np.ndarray:
        raise NotImplementedError

    def dmu(self, x, frame) -> np.ndarray:
        """Differential of the momentum map applied to a frame, shape ``(k, n, n)``."""
        raise NotImplementedError

    def omega_matrix(self, x, V, W) -> np.ndarray:
        raise NotImplementedError

    def random_point(self, rng):
        raise NotImplementedError

    def fixture_points(self):
        """Deterministic special points, used as extra solver starts."""
        raise NotImplementedError

    # -- shared ---------------------------------------------------------
    @property
    def scale(self):
        return self.group.scale

    def act(self, u, x):
        ud = dagger(u)
        return tuple(u @ c @ ud for c in x)

    def push(self, u, v: TangentVector) -> TangentVector:
        """Image of ``v`` under the differential of the action of ``u``."""
        ud = dagger(u)
        return TangentVector(self.act(u, v.point), tuple(u @ a @ ud for a in v.ambient), v.velocity)

    def push_frame(self, u, frame):
        ud = dagger(u)
        return tuple(u @ f @ ud for f in frame)

    def frame(self, x):
        return self.chart_frame(x, np.zeros(self.dim))

    def tangent_basis(self, x) -> list[TangentVector]:
        F = self.frame(x)
        eye = np.eye(self.dim)
        return [TangentVector(x, tuple(f[j] for f in F), eye[j]) for j in range(self.dim)]

    def fund_frame(self, x, Xs):
        """Fundamental vectors ``X u - u X`` (per component) for a stack of algebra elements."""
        return tuple(Xs @ c - c @ Xs for c in x)

    def fund(self, X, x) -> TangentVector:
        F = self.fund_frame(x, np.asarray(X)[None])
        return TangentVector(x, tuple(f[0] for f in F))

    def omega(self, x, v: TangentVector, w: TangentVector) -> float:
        V = tuple(a[None] for a in v.ambient)
        W = tuple(a[None] for a in w.ambient)
        return float(self.omega_matrix(x, V, W)[0, 0])

    def flatten(self, frame) -> np.ndarray:
        """Real ``(k, 2 * ncomp * n * n)`` matrix of a frame."""
        k = frame_len(frame)
        z = np.concatenate([f.reshape(k, -1) for f in frame], axis=1)
        return np.concatenate([z.real, z.imag], axis=1)

    def coords(self, x, frame, basis=None) -> np.ndarray:
        """Chart velocities ``(k, dim)`` of ambient tangent vectors (least squares)."""
        if basis is None:
            basis = self.frame(x)
        if self.dim == 0:
            return np.zeros((frame_len(frame), 0))
        B = self.flatten(basis).T
        c, *_ = np.linalg.lstsq(B, self.flatten(frame).T, rcond=None)
        return c.T

    def from_coords(self, x, velocities, basis=None):
        """Ambient frame from chart velocities ``(k, dim)`` at ``z = 0``."""
        if basis is None:
            basis = self.frame(x)
        return tuple(np.einsum("kj,jab->kab", velocities, f) for f in basis)

    def gram(self, x, basis=None):
        if basis is None:
            basis = self.frame(x)
        return self.omega_matrix(x, basis, basis)

    def project(self, x):
        """Repair unitarity drift of each component by polar projection."""
        return tuple(self.group.project(c) for c in x)

    def theta_left(self, x, frame):
        """``mu^* theta^L`` evaluated on a frame."""
        return dagger(self.mu(x)) @ self.dmu(x, frame)

    def theta_right(self, x, frame):
        return self.dmu(x, frame) @ dagger(self.mu(x))

    def __repr__(self):
        return f"{type(self).__name__}({self.describe()})"

    def describe(self) -> str:
        return f"{self.group}, dim={self.dim}"


def _group_chart(g, c, Zc):
    return c @ exp(g.from_coords(Zc))


def _group_chart_frame(g, c, Zc):
    """Frame of ``z -> c exp(Z(z))``: ``c * D exp_Z(e_j)``."""
    _, D = exp_frechet(g.from_coords(Zc), g.basis)
    return c @ D


class ConjugacyClassSpace(QHamSpace):
    """Conjugacy class of ``u0`` with the inclusion as momentum map.

    Chart at ``u``: ``z -> exp(Z) u exp(-Z)`` with ``Z`` in the orthogonal
    complement of the centraliser algebra of ``u``.
    """

    n_components = 1

    def __init__(self, group: GroupSpec, u0):
        u0 = np.asarray(u0, dtype=complex)
        if not group.is_element(u0, 1e-8):
            raise ValueError("class generator must be an element of the group")
        self.group = group
        self.u0 = group.project(u0)
        self.dim = linalg.rank(group.ad_matrix(self.u0) - np.eye(group.dim))
        self.centralizer_dim = group.dim - self.dim
        if self.dim == 0:
            warnings.warn("central conjugacy class is a single point", DegenerateClass, stacklevel=2)

    def describe(self):
        ph = np.angle(np.linalg.eigvals(self.u0))
        return f"{self.group}, phases={np.round(np.sort(ph), 6).tolist()}"

    def _complement(self, u):
        """Orthonormal coordinate basis (d, dim) of the complement of the centraliser of u."""
        A = self.group.ad_matrix(u) - np.eye(self.group.dim)
        _, _, vh = np.linalg.svd(A)
        return vh[: self.dim].T

    def _Z(self, u, z):
        return self.group.from_coords(self._complement(u) @ z)

    def chart(self, x, z):
        (u,) = x
        if self.dim == 0:
            return (u,)
        Z = self._Z(u, np.asarray(z, dtype=float))
        return (exp(Z) @ u @ exp(-Z),)

    def chart_frame(self, x, z):
        (u,) = x
        n = self.group.n
        if self.dim == 0:
            return (np.zeros((0, n, n), complex),)
        P = self._complement(u)
        Z = self.group.from_coords(P @ np.asarray(z, dtype=float))
        E = self.group.from_coords(P.T)
        eZ, F = exp_frechet(Z, E)
        emZ, G = exp_frechet(-Z, -E)
        return (F @ (u @ emZ) + (eZ @ u) @ G,)

    def mu(self, x):
        return x[0]

    def dmu(self, x, frame):
        return frame[0]

    def _solve_generators(self, u, xi):
        """Algebra coordinates of X with ``X u - u X = xi`` (minimal norm)."""
        g = self.group
        A = np.eye(g.dim) - g.ad_matrix(u)
        U, s, vh = np.linalg.svd(A)
        r = self.dim
        pinv = vh[:r].T @ np.diag(1.0 / s[:r]) @ U[:, :r].T
        return g.coords(xi @ dagger(u)) @ pinv.T

    def omega_matrix(self, x, V, W):
        (u,) = x
        if self.dim == 0:
            return np.zeros((frame_len(V), frame_len(W)))
        XV = self._solve_generators(u, V[0])
        XW = self._solve_generators(u, W[0])
        A = self.group.ad_matrix(u)
        # omega(Xu - uX, Yu - uY) = ((Ad_u X | Y) - (Ad_u Y | X)) / 2
        return 0.5 * XV @ (A.T - A) @ XW.T

    def omega_generators(self, u, X, Y) -> float:
        """The closed formula evaluated directly on generators X, Y."""
        s = self.scale
        return 0.5 * (inner(Ad(u, X), Y, s) - inner(Ad(u, Y), X, s))

    def random_point(self, rng):
        g = self.group.random(rng)
        return (g @ self.u0 @ dagger(g),)

    def fixture_points(self):
        return [(self.u0.copy(),)]


class DoubleSpace(QHamSpace):
    """Internally fused double ``U x U`` with momentum map ``a b a^-1 b^-1``."""

    n_components = 2

    def __init__(self, group: GroupSpec):
        self.group = group
        self.dim = 2 * group.dim

    def chart(self, x, z):
        a, b = x
        d = self.group.dim
        z = np.asarray(z, dtype=float)
        return (_group_chart(self.group, a, z[:d]), _group_chart(self.group, b, z[d:]))

    def chart_frame(self, x, z):
        a, b = x
        g = self.group
        d, n = g.dim, g.n
        z = np.asarray(z, dtype=float)
        fa = np.zeros((2 * d, n, n), complex)
        fb = np.zeros((2 * d, n, n), complex)
        fa[:d] = _group_chart_frame(g, a, z[:d])
        fb[d:] = _group_chart_frame(g, b, z[d:])
        return (fa, fb)

    def mu(self, x):
        a, b = x
        return a @ b @ dagger(a) @ dagger(b)

    def dmu(self, x, frame):
        a, b = x
        xa, xb = frame
        ai, bi = dagger(a), dagger(b)
        ab = a @ b
        return (xa @ (b @ ai @ bi) + a @ xb @ (ai @ bi)
                - (ab @ ai) @ xa @ (ai @ bi) - (ab @ ai @ bi) @ xb @ bi)

    def _forms(self, x, frame):
        a, b = x
        xa, xb = frame
        ai, bi = dagger(a), dagger(b)
        La, Ra = ai @ xa, xa @ ai
        Lb, Rb = bi @ xb, xb @ bi
        # left form of (a, b) -> ab, right form of (a, b) -> a^-1 b^-1
        Lab = (bi @ ai) @ xa @ b + bi @ xb
        Rinv = -ai @ xa - (ai @ bi) @ xb @ a
        return La, Ra, Lb, Rb, Lab, Rinv

    def omega_matrix(self, x, V, W):
        s = self.scale
        La, Ra, Lb, Rb, Lab, Rinv = self._forms(x, V)
        La2, Ra2, Lb2, Rb2, Lab2, Rinv2 = self._forms(x, W)
        return 0.5 * (wedge(s, La, Rb, La2, Rb2)
                      + wedge(s, Ra, Lb, Ra2, Lb2)
                      + wedge(s, Lab, Rinv, Lab2, Rinv2))

    def random_point(self, rng):
        return (self.group.random(rng), self.group.random(rng))

    def fixture_points(self):
        c = self.group.center()
        return [(p.copy(), q.copy()) for p in c for q in c]


class FusionSpace(QHamSpace):
    """Fusion product of two spaces: diagonal action, momentum ``mu1 * mu2``."""

    max_fixtures = 16

    def __init__(self, left: QHamSpace, right: QHamSpace):
        if left.group != right.group:
            raise GroupMismatch(f"cannot fuse spaces over {left.group} and {right.group}")
        self.group = left.group
        self.left, self.right = left, right
        self.dim = left.dim + right.dim
        self.n_components = left.n_components + right.n_components

    def describe(self):
        return f"{self.left!r} * {self.right!r}"

    def _split(self, x):
        k = self.left.n_components
        return tuple(x[:k]), tuple(x[k:])

    def chart(self, x, z):
        x1, x2 = self._split(x)
        z = np.asarray(z, dtype=float)
        return self.left.chart(x1, z[: self.left.dim]) + self.right.chart(x2, z[self.left.dim:])

    def chart_frame(self, x, z):
        x1, x2 = self._split(x)
        z = np.asarray(z, dtype=float)
        d1, d2 = self.left.dim, self.right.dim
        F1 = self.left.chart_frame(x1, z[:d1])
        F2 = self.right.chart_frame(x2, z[d1:])
        n = self.group.n
        out = []
        for f in F1:
            out.append(np.concatenate([f, np.zeros((d2, n, n), complex)]))
        for f in F2:
            out.append(np.concatenate([np.zeros((d1, n, n), complex), f]))
        return tuple(out)

    def mu(self, x):
        x1, x2 = self._split(x)
        return self.left.mu(x1) @ self.right.mu(x2)

    def dmu(self, x, frame):
        x1, x2 = self._split(x)
        f1, f2 = self._split(frame)
        return self.left.dmu(x1, f1) @ self.right.mu(x2) + self.left.mu(x1) @ self.right.dmu(x2, f2)

    def omega_matrix(self, x, V, W):
        x1, x2 = self._split(x)
        V1, V2 = self._split(V)
        W1, W2 = self._split(W)
        m1, m2 = self.left.mu(x1), self.right.mu(x2)
        m1i, m2i = dagger(m1), dagger(m2)
        LV = m1i @ self.left.dmu(x1, V1)
        LW = m1i @ self.left.dmu(x1, W1)
        RV = self.right.dmu(x2, V2) @ m2i
        RW = self.right.dmu(x2, W2) @ m2i
        return (self.left.omega_matrix(x1, V1, W1) + self.right.omega_matrix(x2, V2, W2)
                + 0.5 * wedge(self.scale, LV, RV, LW, RW))

    def random_point(self, rng):
        return self.left.random_point(rng) + self.right.random_point(rng)

    def fixture_points(self):
        out = [p + q for p in self.left.fixture_points() for q in self.right.fixture_points()]
        return out[: self.max_fixtures]


def conjugacy_class(group: GroupSpec, u0) -> ConjugacyClassSpace:
    return ConjugacyClassSpace(group, u0)


def fuse(left: QHamSpace, right: QHamSpace) -> FusionSpace:
    return FusionSpace(left, right)


def double(group: GroupSpec) -> DoubleSpace:
    return DoubleSpace(group)


def class_generator(group: GroupSpec, phases) -> np.ndarray:
    """Diagonal class representative from eigenvalue phases.

    For SU(2) a single angle ``theta`` means ``diag(e^{i theta}, e^{-i theta})``.
    """
    phases = np.atleast_1d(np.asarray(phases, dtype=float))
    if group.is_su2 and phases.size == 1:
        return su2_element(phases[0])
    if phases.size != group.n:
        raise ValueError(f"{group} class needs {group.n} eigenvalue phases, got {phases.size}")
    if group.special and abs(np.exp(1j * phases.sum()) - 1) > 1e-9:
        raise ValueError("eigenvalue phases of an SU(n) class must sum to 0 mod 2 pi")
    return np.diag(np.exp(1j * phases))


def surface_space(group: GroupSpec, genus: int, classes=()) -> QHamSpace:
    """The space ``D(U)^g x C_1 x ... x C_l`` folded left to right.

    ``classes`` holds class generators (matrices).  The momentum map is
    ``[a_1, b_1] ... [a_g, b_g] u_1 ... u_l``.
    """
    if genus < 0:
        raise ValueError("genus must be non-negative")
    classes = list(classes)
    if genus == 0 and not classes:
        raise EmptySurface("need genus >= 1 or at least one conjugacy class")
    factors = [DoubleSpace(group) for _ in range(genus)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateClass)
        factors += [ConjugacyClassSpace(group, c) for c in classes]
    return reduce(fuse, factors)
