"""Isotropy types, reduced forms and the stratification of ``mu^{-1}(1) / U``.

Each point of the level set is assigned the isotropy algebra of its stabiliser
(tagged CenterZ / MaximalTorus / FullGroup for SU(2)).  Within the isotropy
submanifold ``M_K`` the quotient by ``L_K = N(K)/K`` is modelled at a point by
a *slice*: the complement of the ``L_K``-orbit directions inside
``ker T mu`` intersected with the ``K``-fixed tangent vectors.  The reduced form
is omega restricted to the slice.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import NotOnLevel, UnsupportedType
from .level import LevelSolverConfig, level_residual
from .lie import dagger, exp_frechet, log
from .local import LocalModel
from .verify import VerifierConfig, exterior_derivative_fd

SU2_TAGS = {0: "CenterZ", 1: "MaximalTorus", 3: "FullGroup"}
# L_K = N(K)/K for the SU(2) stabiliser types
SU2_QUOTIENT_GROUPS = {"CenterZ": "SU(2)/Z2", "MaximalTorus": "Weyl Z2", "FullGroup": "trivial"}


@dataclass
class StrataConfig:
    """Thresholds shared by isotropy detection, slices and reduced forms."""

    rtol: float = 1e-9
    angle_tol: float = 1e-6
    h: float = 1e-4
    tol_level: float = 1e-10
    drift_tol: float = 1e-9
    closedness_tol: float = 1e-5
    ambiguity_factor: float = 10.0
    seed: int = 0

    @classmethod
    def from_configs(cls, verifier: VerifierConfig, solver: LevelSolverConfig, seed: int = 0):
        return cls(rtol=verifier.tol_exact, angle_tol=verifier.angle_tol, h=verifier.h,
                   tol_level=solver.tol_level, closedness_tol=verifier.tol_fd, seed=seed)


@dataclass(eq=False)
class IsotropyType:
    algebra_dim: int
    tag: str
    basis: np.ndarray  # (d, algebra_dim) coordinates of a basis of the isotropy algebra
    ambiguous: bool = False
    center_acts_trivially: bool | None = None

    @property
    def quotient_group(self):
        return SU2_QUOTIENT_GROUPS.get(self.tag, "N(K)/K")


def isotropy_algebra(space, x, cfg: StrataConfig | None = None, local: LocalModel | None = None):
    """``(d, k)`` orthonormal basis (algebra coordinates) of ``{X : X# = 0}``."""
    cfg = cfg or StrataConfig()
    loc = local or LocalModel(space, x, cfg.rtol)
    return loc.isotropy_with(cfg.rtol)


def _tag(group, dim):
    if group.is_su2 and dim in SU2_TAGS:
        return SU2_TAGS[dim]
    return f"Generic({dim})"


def classify_isotropy(space, x, cfg: StrataConfig | None = None, local: LocalModel | None = None) -> IsotropyType:
    """Isotropy type of ``x``; flagged ambiguous if the dimension moves when the threshold is scaled."""
    cfg = cfg or StrataConfig()
    loc = local or LocalModel(space, x, cfg.rtol)
    basis = loc.isotropy_with(cfg.rtol)
    k = basis.shape[1]
    f = cfg.ambiguity_factor
    dims = {loc.isotropy_with(cfg.rtol * f).shape[1], loc.isotropy_with(cfg.rtol / f).shape[1], k}
    out = IsotropyType(k, _tag(space.group, k), basis, ambiguous=len(dims) > 1)
    if k == 0 and space.group.is_su2:
        # the stabiliser is finite; the centre must act trivially for the CenterZ tag
        y = space.act(-np.eye(2), x)
        out.center_acts_trivially = bool(max(np.abs(a - b).max() for a, b in zip(x, y)) < 1e-12)
        if not out.center_acts_trivially:
            out.tag = "Generic(0)"
    return out


def normalizer_algebra(group, K: np.ndarray, rtol: float = 1e-9) -> np.ndarray:
    """``(d, m)`` basis of ``{X : [X, Y] in k for all Y in k}`` for ``k`` spanned by columns of ``K``."""
    d = group.dim
    if K.shape[1] == 0:
        return np.eye(d)
    perp = linalg.complement(K, d)
    if perp.shape[1] == 0:
        return np.eye(d)
    Ys = group.from_coords(K.T)
    rows = []
    for Y in Ys:
        br = group.basis @ Y - Y @ group.basis  # [e_a, Y]
        rows.append(perp.T @ group.coords(br).T)
    return linalg.null_space(np.vstack(rows), rtol)


def orbit_algebra(group, K: np.ndarray, rtol: float = 1e-9) -> np.ndarray:
    """Complement of ``k`` inside its normaliser algebra: the Lie algebra of ``L_K``."""
    N = normalizer_algebra(group, K, rtol)
    if K.shape[1] == 0:
        return N
    return linalg.orth(N - K @ (K.T @ N), rtol)


def fixed_tangent_subspace(space, x, K: IsotropyType, cfg: StrataConfig | None = None,
                           local: LocalModel | None = None) -> np.ndarray:
    """``(dim, m)`` orthonormal chart-coordinate basis of the ``K``-fixed tangent vectors.

    Uses the infinitesimal action ``v -> [X, v]`` (componentwise) for ``X`` in
    the isotropy algebra.  In SU(2) the discrete part of every stabiliser is
    the centre, which acts trivially under conjugation.
    """
    cfg = cfg or StrataConfig()
    loc = local or LocalModel(space, x, cfg.rtol)
    n = space.dim
    if K.algebra_dim == 0 or n == 0:
        return np.eye(n)
    blocks = []
    for X in space.group.from_coords(K.basis.T):
        comm = tuple(X @ f - f @ X for f in loc.basis)
        blocks.append(space.flatten(comm))
    C = np.concatenate(blocks, axis=1)
    return linalg.null_space(C.T, cfg.rtol)


@dataclass
class KernelRestriction:
    dim_kernel_restricted: int
    dim_kernel_intersection: int
    principal_angle: float
    passed: bool


def kernel_restriction_check(space, x, K: IsotropyType, cfg: StrataConfig | None = None,
                             local: LocalModel | None = None) -> KernelRestriction:
    """Compare ``ker(omega|V_K)`` with ``ker omega ∩ V_K``."""
    cfg = cfg or StrataConfig()
    loc = local or LocalModel(space, x, cfg.rtol)
    V = fixed_tangent_subspace(space, x, K, cfg, loc)
    if V.shape[1] == 0:
        return KernelRestriction(0, 0, 0.0, True)
    GK = V.T @ loc.G @ V
    restricted = V @ linalg.null_space(GK, cfg.rtol)
    inter = linalg.intersect(loc.ker_omega, V, cfg.rtol)
    angle = linalg.max_principal_angle(restricted, inter)
    ok = restricted.shape[1] == inter.shape[1] and angle < cfg.angle_tol
    return KernelRestriction(restricted.shape[1], inter.shape[1], angle, bool(ok))


def _restricted_gram_fd(space, x, V):
    """Gram matrix of omega pulled back by ``y -> chart(x, V y)``."""
    def gram_at(y):
        z = V @ y
        F = space.chart_frame(x, z)
        T = tuple(np.einsum("ji,jab->iab", V, f) for f in F)
        return space.omega_matrix(space.chart(x, z), T, T)
    return gram_at


@dataclass
class IsotropyQHamReport:
    tag: str
    fixed_dim: int
    normalizer_residual: float
    closedness: float
    rank: int
    nondegenerate: bool
    passed: bool


def isotropy_qham_check(space, x, K: IsotropyType, cfg: StrataConfig | None = None,
                        local: LocalModel | None = None) -> IsotropyQHamReport:
    """Checks on ``(M_K, omega|M_K)`` when ``L_K`` is finite.

    Then ``Lie(L_K) = 0``, so the axioms for ``M_K`` reduce to: ``mu(x)``
    centralises ``K``, ``omega|M_K`` is closed and nondegenerate.
    """
    cfg = cfg or StrataConfig()
    loc = local or LocalModel(space, x, cfg.rtol)
    if K.algebra_dim == 0 or orbit_algebra(space.group, K.basis, cfg.rtol).shape[1] != 0:
        raise UnsupportedType(f"isotropy type {K.tag} has infinite L_K; only finite L_K is implemented")
    m = loc.mu
    Xs = space.group.from_coords(K.basis.T)
    norm_res = float(max(np.abs(m @ X @ dagger(m) - X).max() for X in Xs))
    V = fixed_tangent_subspace(space, x, K, cfg, loc)
    k = V.shape[1]
    closed = 0.0
    if k >= 3:
        closed = float(np.max(np.abs(exterior_derivative_fd(_restricted_gram_fd(space, x, V), k, cfg.h))))
    GK = V.T @ loc.G @ V
    r = linalg.rank(GK, cfg.rtol)
    ok = norm_res < 1e-10 and closed < cfg.closedness_tol and r == k
    return IsotropyQHamReport(K.tag, k, norm_res, closed, r, r == k, bool(ok))


@dataclass(eq=False)
class ReducedFormResult:
    isotropy: IsotropyType
    slice_basis: np.ndarray  # (dim, s) chart coordinates
    matrix: np.ndarray  # (s, s)
    rank: int
    level_tangent_dim: int
    orbit_dim: int
    representative_drift: float
    closedness: float | None

    @property
    def slice_dim(self):
        return self.slice_basis.shape[1]

    @property
    def quotient_dim(self):
        return self.slice_dim

    @property
    def nondegenerate(self):
        return self.rank == self.slice_dim


def _section_closedness(space, x, loc, W, cfg, radius):
    """FD exterior derivative of omega pulled back to a local section of the level set.

    The section is ``y -> chart(x, W y + N c(y))`` with ``c(y)`` chosen by Newton
    so that ``mu = 1``; ``N`` spans the complement of ``ker T mu``.  Requires
    ``T mu`` onto (trivial isotropy algebra).
    """
    g = space.group
    N = linalg.complement(loc.ker_dmu, space.dim)
    if N.shape[1] != g.dim:
        return None

    def jac_left(z):
        y = space.chart(x, z)
        F = space.chart_frame(x, z)
        m = space.mu(y)
        return y, F, m, g.coords(dagger(m) @ space.dmu(y, F)).T

    def gram_at(yv):
        c = np.zeros(g.dim)
        for _ in range(30):
            z = W @ yv + N @ c
            y, F, m, JL = jac_left(z)
            R = log(m, radius, special=g.special)
            r = g.coords(R)
            if np.linalg.norm(r) < 1e-15:
                break
            eR, D = exp_frechet(R, g.basis)
            Phi = g.coords(dagger(eR) @ D).T
            c = c - np.linalg.solve(np.linalg.solve(Phi, JL) @ N, r)
        z = W @ yv + N @ c
        y, F, m, JL = jac_left(z)
        # tangent of the section: W + N dc/dy with JL (W + N dc/dy) = 0
        T = W - N @ np.linalg.solve(JL @ N, JL @ W)
        Tf = tuple(np.einsum("ji,jab->iab", T, f) for f in F)
        return space.omega_matrix(y, Tf, Tf)

    dw = exterior_derivative_fd(gram_at, W.shape[1], cfg.h)
    return float(np.max(np.abs(dw)))


def reduced_form(space, x, cfg: StrataConfig | None = None, stratum_aware: bool = True,
                 isotropy: IsotropyType | None = None, radius: float | None = None) -> ReducedFormResult:
    """Matrix of the reduced symplectic form at a level point ``x``.

    With ``stratum_aware`` the slice lives in ``T_x M_K`` and only
    ``L_K``-orbit directions are removed; otherwise the slice is a complement of
    the full orbit inside ``ker T mu``.
    """
    from .lie import DEFAULT_LOG_RADIUS

    cfg = cfg or StrataConfig()
    radius = DEFAULT_LOG_RADIUS if radius is None else radius
    res = level_residual(space, x, radius)
    if not res < cfg.tol_level:
        raise NotOnLevel(res, cfg.tol_level)
    loc = LocalModel(space, x, cfg.rtol)
    n = space.dim
    K = isotropy or classify_isotropy(space, x, cfg, loc)
    if stratum_aware:
        V = fixed_tangent_subspace(space, x, K, cfg, loc)
        orbit_alg = orbit_algebra(space.group, K.basis, cfg.rtol)
    else:
        V = np.eye(n)
        orbit_alg = np.eye(space.group.dim)
    domain = linalg.intersect(loc.ker_dmu, V, cfg.rtol) if n else np.zeros((0, 0))
    orbit = linalg.orth(loc.F @ orbit_alg, cfg.rtol) if orbit_alg.shape[1] and n else np.zeros((n, 0))
    O = linalg.intersect(orbit, domain, cfg.rtol) if orbit.shape[1] else orbit
    W = linalg.restrict_complement(O, domain)
    M = W.T @ loc.G @ W
    rank = linalg.rank(M, cfg.rtol) if M.size else 0

    drift = 0.0
    if W.shape[1]:
        rng = np.random.default_rng(cfg.seed)
        Wp = W + loc.F @ rng.standard_normal((space.group.dim, W.shape[1]))
        drift = float(np.max(np.abs(Wp.T @ loc.G @ Wp - M)))

    s = W.shape[1]
    if s < 3:
        closed = 0.0
    elif K.algebra_dim == 0:
        closed = _section_closedness(space, x, loc, W, cfg, radius)
    else:
        closed = None
    return ReducedFormResult(K, W, M, rank, domain.shape[1], O.shape[1], drift, closed)


@dataclass(eq=False)
class StratumRecord:
    tag: str
    algebra_dim: int
    quotient_group: str
    points: list = field(default_factory=list)
    level_tangent_dims: list = field(default_factory=list)
    orbit_dims: list = field(default_factory=list)
    quotient_dims: list = field(default_factory=list)
    ranks: list = field(default_factory=list)
    drifts: list = field(default_factory=list)
    closedness: list = field(default_factory=list)
    results: list = field(default_factory=list)

    @staticmethod
    def _mode(values):
        return Counter(values).most_common(1)[0][0] if values else None

    @property
    def quotient_dim(self):
        return self._mode(self.quotient_dims)

    @property
    def level_tangent_dim(self):
        return self._mode(self.level_tangent_dims)

    @property
    def orbit_dim(self):
        return self._mode(self.orbit_dims)

    @property
    def reduced_rank(self):
        return self._mode(self.ranks)

    @property
    def consistent(self):
        return len(set(self.quotient_dims)) <= 1 and len(set(self.ranks)) <= 1

    @property
    def symplectic(self):
        return all(r == q for r, q in zip(self.ranks, self.quotient_dims))

    @property
    def even(self):
        return all(q % 2 == 0 for q in self.quotient_dims)

    @property
    def max_drift(self):
        return max(self.drifts, default=0.0)

    @property
    def max_closedness(self):
        vals = [c for c in self.closedness if c is not None]
        return max(vals) if vals else None


AMBIGUOUS = "Ambiguous"


def stratify(space, solutions, cfg: StrataConfig | None = None) -> list[StratumRecord]:
    """Partition level points by isotropy type and attach reduced-form data.

    Points whose type changes under a 10x change of the SVD threshold are put
    in a separate ``Ambiguous`` record without reduced data.
    """
    cfg = cfg or StrataConfig()
    records: dict[str, StratumRecord] = {}
    ambiguous = StratumRecord(AMBIGUOUS, -1, "-")
    for x in solutions:
        loc = LocalModel(space, x, cfg.rtol)
        K = classify_isotropy(space, x, cfg, loc)
        if K.ambiguous:
            ambiguous.points.append(x)
            continue
        rf = reduced_form(space, x, cfg, True, K)
        rec = records.setdefault(K.tag, StratumRecord(K.tag, K.algebra_dim, K.quotient_group))
        rec.points.append(x)
        rec.level_tangent_dims.append(rf.level_tangent_dim)
        rec.orbit_dims.append(rf.orbit_dim)
        rec.quotient_dims.append(rf.quotient_dim)
        rec.ranks.append(rf.rank)
        rec.drifts.append(rf.representative_drift)
        rec.closedness.append(rf.closedness)
        rec.results.append(rf)
    out = sorted(records.values(), key=lambda r: (r.algebra_dim, r.tag))
    if ambiguous.points:
        out.append(ambiguous)
    return out
