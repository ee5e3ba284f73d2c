"""Numerical certification of the quasi-Hamiltonian axioms at sampled points.

Three identities are checked for a space ``(M, omega, mu)``:

* (i)   ``d omega = -mu^* chi``, by central differences of omega in a chart;
* (ii)  ``ker omega_x = {X# : (Ad mu(x) + Id) X = 0}``;
* (iii) ``omega(X#, .) = (mu^*(theta^L + theta^R) | X) / 2``.

Together with the four structural facts about ``ker T mu``, ``ker omega`` and
the orbit directions.  Subspaces are compared by principal angles.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import linalg
from .errors import ChartFailure
from .lie import TAU_UNITARY, cartan3_tensor, dagger, inner_gram
from .local import LocalModel


@dataclass
class VerifierConfig:
    h: float = 1e-4
    tol_exact: float = 1e-9
    tol_fd: float = 1e-5
    angle_tol: float = 1e-6
    samples: int = 100
    seed: int = 0
    convergence: bool = True
    convergence_band: tuple = (3.0, 5.0)

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("finite-difference step must be positive")
        if not (self.tol_exact > 0 and self.tol_fd > 0 and self.angle_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.samples < 0:
            raise ValueError("samples must be non-negative")


def _chart_gram(space, x, z):
    y = space.chart(x, z)
    for c in y:
        if np.linalg.norm(dagger(c) @ c - np.eye(c.shape[0])) > TAU_UNITARY:
            raise ChartFailure("chart left the group beyond tolerance", point=x)
    F = space.chart_frame(x, z)
    return space.omega_matrix(y, F, F)


def exterior_derivative_fd(gram_at, n, h):
    """``d sigma`` of a 2-form given by ``gram_at(z) -> (n, n)`` on ``R^n``, at ``z = 0``.

    Returns ``D[i, j, k] = d_i s_jk - d_j s_ik + d_k s_ij`` by central differences.
    """
    D = np.zeros((n, n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        D[i] = (gram_at(e) - gram_at(-e)) / (2 * h)
    return D - np.einsum("jik->ijk", D) + np.einsum("kij->ijk", D)


def check_axiom_i(space, x, cfg: VerifierConfig, h: float | None = None) -> float:
    """Max over coordinate triples of ``|d omega + mu^* chi|``."""
    h = cfg.h if h is None else h
    n = space.dim
    if n < 3:
        # no 3-forms on a manifold of dimension < 3
        return 0.0
    dw = exterior_derivative_fd(lambda z: _chart_gram(space, x, z), n, h)
    L = space.theta_left(x, space.frame(x))
    chi = cartan3_tensor(L, space.scale)
    return float(np.max(np.abs(dw + chi)))


@dataclass
class AxiomIIResult:
    dim_ker_omega: int
    dim_ker_ad_plus_id: int
    dim_fund_image: int
    principal_angle: float
    passed: bool


def check_axiom_ii(space, x, cfg: VerifierConfig, local: LocalModel | None = None) -> AxiomIIResult:
    loc = local or LocalModel(space, x, cfg.tol_exact)
    K = loc.ker_omega
    A = loc.ker_ad_plus_id
    image = linalg.orth(loc.F @ A, cfg.tol_exact) if A.shape[1] else np.zeros((space.dim, 0))
    angle = linalg.max_principal_angle(K, image)
    passed = K.shape[1] == image.shape[1] == A.shape[1] and angle < cfg.angle_tol
    return AxiomIIResult(K.shape[1], A.shape[1], image.shape[1], angle, bool(passed))


def check_axiom_iii(space, x, X, cfg: VerifierConfig, analytic: bool = True,
                    local: LocalModel | None = None) -> float:
    """Max over basis vectors ``v`` of ``|omega(X#, v) - (theta^L + theta^R)(T mu v) | X) / 2|``."""
    if space.dim == 0:
        return 0.0
    loc = local or LocalModel(space, x, cfg.tol_exact)
    X = np.asarray(X)
    lhs = space.omega_matrix(x, space.fund_frame(x, X[None]), loc.basis)[0]
    m = loc.mu
    if analytic:
        dm = space.dmu(x, loc.basis)
    else:
        dm = []
        for j in range(space.dim):
            e = np.zeros(space.dim)
            e[j] = cfg.h
            dm.append((space.mu(space.chart(x, e)) - space.mu(space.chart(x, -e))) / (2 * cfg.h))
        dm = np.array(dm)
    theta = dagger(m) @ dm + dm @ dagger(m)
    rhs = 0.5 * inner_gram(theta, X[None], space.scale)[:, 0]
    return float(np.max(np.abs(lhs - rhs)))


@dataclass
class FactsReport:
    lambda_injective: bool
    lambda_dims: tuple
    lambda_angle: float
    kernel_intersection_dim: int
    image_angle: float
    image_dims: tuple
    orbit_angle: float
    orbit_dims: tuple
    passed: bool

    @property
    def max_angle(self):
        return max(self.lambda_angle, self.image_angle, self.orbit_angle)


def check_facts(space, x, cfg: VerifierConfig, local: LocalModel | None = None) -> FactsReport:
    loc = local or LocalModel(space, x, cfg.tol_exact)
    tol = cfg.tol_exact
    n, d = space.dim, space.group.dim

    # (i) X -> X# is injective on ker(Ad mu + Id) with image ker omega
    A = loc.ker_ad_plus_id
    lam = loc.F @ A
    injective = linalg.rank(lam, tol) == A.shape[1] if A.shape[1] else True
    lam_img = linalg.orth(lam, tol) if A.shape[1] else np.zeros((n, 0))
    lam_angle = linalg.max_principal_angle(lam_img, loc.ker_omega)

    # (ii) ker T mu and ker omega meet only in 0
    inter = linalg.intersect(loc.ker_dmu, loc.ker_omega, tol)

    # (iii) image of mu^* theta^L is the orthogonal complement of the isotropy algebra
    img = linalg.orth(loc.J, tol)
    iso_perp = linalg.complement(loc.isotropy, d)
    img_angle = linalg.max_principal_angle(img, iso_perp)

    # (iv) omega-orthogonal of ker T mu is spanned by the fundamental vectors
    Kmu = loc.ker_dmu
    perp = linalg.null_space((loc.G @ Kmu).T, tol) if Kmu.shape[1] else np.eye(n)
    orbit = linalg.orth(loc.F, tol)
    orb_angle = linalg.max_principal_angle(perp, orbit)

    passed = (injective and inter.shape[1] == 0
              and max(lam_angle, img_angle, orb_angle) < cfg.angle_tol)
    return FactsReport(
        lambda_injective=bool(injective),
        lambda_dims=(lam_img.shape[1], loc.ker_omega.shape[1]),
        lambda_angle=lam_angle,
        kernel_intersection_dim=inter.shape[1],
        image_angle=img_angle,
        image_dims=(img.shape[1], iso_perp.shape[1]),
        orbit_angle=orb_angle,
        orbit_dims=(perp.shape[1], orbit.shape[1]),
        passed=bool(passed),
    )


def equivariance_residual(space, x, u) -> float:
    return float(np.linalg.norm(space.mu(space.act(u, x)) - u @ space.mu(x) @ dagger(u)))


def invariance_residual(space, x, u, local: LocalModel | None = None) -> float:
    """Max change of the Gram matrix of omega when the basis is pushed by ``u``."""
    if space.dim == 0:
        return 0.0
    basis = local.basis if local else space.frame(x)
    G0 = local.G if local else space.gram(x, basis)
    pb = space.push_frame(u, basis)
    G1 = space.omega_matrix(space.act(u, x), pb, pb)
    return float(np.max(np.abs(G1 - G0)))


@dataclass
class AxiomReport:
    space: str
    samples: int
    residuals: dict = field(default_factory=dict)
    maxima: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    passed: bool = True

    def to_dict(self):
        return asdict(self)


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream per sample, so results do not depend on evaluation order."""
    return np.random.default_rng([seed, index])


def verify_point(space, x, X, u, cfg: VerifierConfig) -> dict:
    loc = LocalModel(space, x, cfg.tol_exact)
    out = {}
    out["axiom_i"] = check_axiom_i(space, x, cfg)
    if cfg.convergence:
        out["axiom_i_half_step"] = check_axiom_i(space, x, cfg, h=cfg.h / 2)
    ii = check_axiom_ii(space, x, cfg, loc)
    out["axiom_ii_angle"] = ii.principal_angle
    out["axiom_ii_dims"] = [ii.dim_ker_omega, ii.dim_ker_ad_plus_id, ii.dim_fund_image]
    out["axiom_ii_pass"] = ii.passed
    out["axiom_iii_analytic"] = check_axiom_iii(space, x, X, cfg, True, loc)
    out["axiom_iii_fd"] = check_axiom_iii(space, x, X, cfg, False, loc)
    facts = check_facts(space, x, cfg, loc)
    out["facts_angle"] = facts.max_angle
    out["facts_kernel_intersection"] = facts.kernel_intersection_dim
    out["facts_pass"] = facts.passed
    out["equivariance"] = equivariance_residual(space, x, u)
    out["invariance"] = invariance_residual(space, x, u, loc)
    return out


def roundoff_floor(h: float) -> float:
    """Residual level below which central differences with step ``h`` are dominated by rounding."""
    return 1e3 * np.finfo(float).eps / h


def convergence_ratio(coarse, fine, floor=1e-11):
    """Ratio of summed axiom-(i) residuals at ``h`` and ``h / 2``; ``None`` if all are at roundoff."""
    coarse, fine = np.asarray(coarse), np.asarray(fine)
    keep = coarse > floor
    if not keep.any():
        return None
    return float(coarse[keep].sum() / fine[keep].sum())


def verify_space(space, cfg: VerifierConfig | None = None) -> AxiomReport:
    """Run every check at ``cfg.samples`` random points (deterministic given the seed)."""
    cfg = cfg or VerifierConfig()
    rows = []
    for i in range(cfg.samples):
        rng = sample_rng(cfg.seed, i)
        x = space.random_point(rng)
        X = space.group.random_algebra(rng)
        u = space.group.random(rng)
        try:
            rows.append(verify_point(space, x, X, u, cfg))
        except ChartFailure as exc:
            exc.point = x
            raise
    report = AxiomReport(space=repr(space), samples=cfg.samples)
    if not rows:
        return report
    keys = rows[0].keys()
    report.residuals = {k: [r[k] for r in rows] for k in keys}
    res = report.residuals

    def mx(key):
        return float(np.max(res[key]))

    report.maxima = {k: mx(k) for k in ("axiom_i", "axiom_ii_angle", "axiom_iii_analytic",
                                         "axiom_iii_fd", "facts_angle", "equivariance", "invariance")}
    flags = {
        "axiom_i": report.maxima["axiom_i"] < cfg.tol_fd,
        "axiom_ii": all(res["axiom_ii_pass"]),
        "axiom_iii_analytic": report.maxima["axiom_iii_analytic"] < cfg.tol_exact,
        "axiom_iii_fd": report.maxima["axiom_iii_fd"] < cfg.tol_fd,
        "facts": all(res["facts_pass"]),
        "equivariance": report.maxima["equivariance"] < 1e-10,
        "invariance": report.maxima["invariance"] < 1e-10,
    }
    if cfg.convergence:
        ratio = convergence_ratio(res["axiom_i"], res["axiom_i_half_step"], roundoff_floor(cfg.h / 2))
        report.maxima["axiom_i_convergence_ratio"] = ratio
        lo, hi = cfg.convergence_band
        flags["axiom_i_convergence"] = ratio is None or lo <= ratio <= hi
    report.flags = {k: bool(v) for k, v in flags.items()}
    report.passed = all(report.flags.values())
    return report
