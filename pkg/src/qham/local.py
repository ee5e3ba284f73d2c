"""Linear data of a space at one point, expressed in chart coordinates.

Tangent vectors are chart velocities (columns in ``R^dim``); algebra elements
are coordinates in the orthonormal basis of the group (columns in ``R^d``).
"""
from __future__ import annotations

from functools import cached_property

import numpy as np

from . import linalg
from .lie import dagger


class LocalModel:
    """Gram matrix of omega, Jacobian of mu and fundamental vectors at ``x``."""

    def __init__(self, space, x, rtol: float = 1e-9):
        self.space = space
        self.x = x
        self.rtol = rtol
        self.group = space.group
        self.basis = space.frame(x)

    @property
    def dim(self):
        return self.space.dim

    @cached_property
    def mu(self):
        return self.space.mu(self.x)

    @cached_property
    def G(self) -> np.ndarray:
        """``G[i, j] = omega(e_i, e_j)``."""
        return self.space.gram(self.x, self.basis)

    @cached_property
    def J(self) -> np.ndarray:
        """``(d, dim)`` matrix of ``v -> theta^L(T mu . v)`` (analytic differential)."""
        if self.dim == 0:
            return np.zeros((self.group.dim, 0))
        return self.group.coords(dagger(self.mu) @ self.space.dmu(self.x, self.basis)).T

    def J_fd(self, h: float) -> np.ndarray:
        """Same as :attr:`J` with ``T mu`` by central differences through the chart."""
        sp, g = self.space, self.group
        cols = []
        for j in range(self.dim):
            e = np.zeros(self.dim)
            e[j] = h
            d = (sp.mu(sp.chart(self.x, e)) - sp.mu(sp.chart(self.x, -e))) / (2 * h)
            cols.append(g.coords(dagger(self.mu) @ d))
        return np.array(cols).T.reshape(g.dim, self.dim)

    @cached_property
    def fund_ambient(self):
        return self.space.fund_frame(self.x, self.group.basis)

    @cached_property
    def F(self) -> np.ndarray:
        """``(dim, d)``: chart velocities of the fundamental vectors of the basis."""
        return self.space.coords(self.x, self.fund_ambient, self.basis).T

    @cached_property
    def isotropy(self) -> np.ndarray:
        """``(d, k)`` orthonormal basis of the isotropy algebra ``{X : X# = 0}``."""
        return linalg.null_space(self.space.flatten(self.fund_ambient).T, self.rtol)

    def isotropy_with(self, rtol) -> np.ndarray:
        return linalg.null_space(self.space.flatten(self.fund_ambient).T, rtol)

    @cached_property
    def ker_omega(self) -> np.ndarray:
        return linalg.null_space(self.G, self.rtol)

    @cached_property
    def ker_dmu(self) -> np.ndarray:
        return linalg.null_space(self.J, self.rtol)

    @cached_property
    def ad_mu(self) -> np.ndarray:
        return self.group.ad_matrix(self.mu)

    @cached_property
    def ker_ad_plus_id(self) -> np.ndarray:
        """``(d, k)`` basis of ``ker(Ad mu(x) + Id)``."""
        return linalg.null_space(self.ad_mu + np.eye(self.group.dim), self.rtol)

    def ambient(self, velocities):
        """Ambient frame of chart velocities given as columns ``(dim, k)``."""
        return self.space.from_coords(self.x, np.asarray(velocities).T, self.basis)
