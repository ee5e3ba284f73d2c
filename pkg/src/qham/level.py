"""Solving the momentum level set ``mu(x) = 1``.

Inside the log ball, ``mu(x) = 1`` iff ``log mu(x) = 0``, so each restart
minimises ``f(x) = |log mu(x)|^2 / 2`` in the chart centred at the current
point (a retraction step), with a damped Gauss-Newton direction and an Armijo
backtracking line search.  Starts whose momentum lies outside the log ball are
first pulled in by minimising ``|mu(x) - 1|_F^2 / 2``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyLevel, NoConvergence, OutOfBall
from .lie import DEFAULT_LOG_RADIUS, dagger, exp_frechet, log, log_phase

logger = logging.getLogger(__name__)


@dataclass
class LevelSolverConfig:
    max_iters: int = 200
    tol_level: float = 1e-10
    restarts: int = 64
    seed: int = 0
    log_radius: float = DEFAULT_LOG_RADIUS
    armijo: float = 1e-4
    shrink: float = 0.5
    max_backtracks: int = 50
    entry_margin: float = 0.2
    polish: float = 1e-14

    def __post_init__(self):
        if not self.tol_level > 0:
            raise ValueError("tol_level must be positive")
        if not 0 < self.log_radius < np.pi:
            raise ValueError("log ball radius must lie in (0, pi)")


@dataclass
class SolveResult:
    points: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    iterations: list = field(default_factory=list)
    start_index: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def __len__(self):
        return len(self.points)


def level_residual(space, x, radius=DEFAULT_LOG_RADIUS) -> float:
    """``|log mu(x)|`` in the inner-product norm; ``inf`` outside the log ball."""
    try:
        R = log(space.mu(x), radius, special=space.group.special)
    except OutOfBall:
        return np.inf
    return float(np.linalg.norm(space.group.coords(R)))


def _log_residual(space, x, radius):
    """Coordinates of ``log mu(x)`` and the exact Jacobian in chart coordinates."""
    g = space.group
    m = space.mu(x)
    R = log(m, radius, special=g.special)
    r = g.coords(R)
    JL = g.coords(dagger(m) @ space.dmu(x, space.frame(x))).T
    # theta^L(d exp_R(dR)) = Phi dR
    eR, D = exp_frechet(R, g.basis)
    Phi = g.coords(dagger(eR) @ D).T
    return r, np.linalg.solve(Phi, JL)


def _frobenius_residual(space, x):
    m = space.mu(x)
    n = m.shape[0]
    diff = (m - np.eye(n)).ravel()
    dm = space.dmu(x, space.frame(x)).reshape(space.dim, -1)
    r = np.concatenate([diff.real, diff.imag])
    J = np.concatenate([dm.real, dm.imag], axis=1).T
    return r, J


def _descend(space, x, residual_fn, cfg, stop):
    """Damped Gauss-Newton with backtracking.  Returns (x, f, iterations, reason)."""
    r, J = residual_fn(x)
    f = 0.5 * r @ r
    for it in range(cfg.max_iters):
        if stop(x, r):
            return x, f, it, "converged"
        grad = J.T @ r
        lam = min(np.sqrt(2 * f), 1.0)
        step = -np.linalg.solve(J.T @ J + lam * np.eye(space.dim), grad)
        slope = grad @ step
        t = 1.0
        for _ in range(cfg.max_backtracks):
            y = space.project(space.chart(x, t * step))
            try:
                r_new, J_new = residual_fn(y)
            except OutOfBall:
                t *= cfg.shrink
                continue
            f_new = 0.5 * r_new @ r_new
            if f_new <= f + cfg.armijo * t * slope:
                break
            t *= cfg.shrink
        else:
            return x, f, it, "line search failed"
        x, r, J = y, r_new, J_new
        if f - f_new <= 1e-15 * max(f, 1e-300) and f_new > 0:
            return x, f_new, it + 1, "stalled"
        f = f_new
    return x, f, cfg.max_iters, "converged" if stop(x, r) else "max iterations"


def solve_from(space, x0, cfg: LevelSolverConfig):
    """One restart.  Returns ``(point, residual, iterations)`` or raises :class:`NoConvergence`."""
    x = space.project(x0)
    if space.dim == 0:
        res = level_residual(space, x, cfg.log_radius)
        if res < cfg.tol_level:
            return x, res, 0
        raise NoConvergence(f"zero-dimensional space with |log mu| = {res:.3e}")
    iters = 0
    if log_phase(space.mu(x)) >= cfg.log_radius - cfg.entry_margin:
        inside = lambda y, r: log_phase(space.mu(y)) < cfg.log_radius - cfg.entry_margin  # noqa: E731
        x, _, iters, _ = _descend(space, x, lambda y: _frobenius_residual(space, y), cfg, inside)
        if not inside(x, None):
            raise NoConvergence("momentum never entered the log ball")
    # polish well below tol_level so rank decisions downstream are not blurred
    on_level = lambda y, r: np.linalg.norm(r) < min(0.1 * cfg.tol_level, cfg.polish)  # noqa: E731
    x, f, more, reason = _descend(space, x, lambda y: _log_residual(space, y, cfg.log_radius), cfg, on_level)
    x = space.project(x)
    res = level_residual(space, x, cfg.log_radius)
    if res < cfg.tol_level:
        return x, res, iters + more
    raise NoConvergence(f"{reason}: |log mu| = {res:.3e}")


def solve_level_one(space, cfg: LevelSolverConfig | None = None, starts=()) -> SolveResult:
    """Points of ``mu^{-1}(1)`` from the given starts followed by ``cfg.restarts`` random ones.

    Raises :class:`EmptyLevel` when every start fails.
    """
    cfg = cfg or LevelSolverConfig()
    out = SolveResult()
    candidates = list(starts)
    candidates += [space.random_point(np.random.default_rng([cfg.seed, i])) for i in range(cfg.restarts)]
    for i, x0 in enumerate(candidates):
        try:
            x, res, its = solve_from(space, x0, cfg)
        except NoConvergence as exc:
            logger.debug("restart %d failed: %s", i, exc)
            out.failures.append((i, str(exc)))
            continue
        out.points.append(x)
        out.residuals.append(res)
        out.iterations.append(its)
        out.start_index.append(i)
    if not out.points:
        raise EmptyLevel(out.failures)
    return out
