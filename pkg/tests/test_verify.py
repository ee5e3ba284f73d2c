import numpy as np
import pytest
from scipy.stats import ortho_group

from qham import linalg
from qham.errors import ChartFailure, DegenerateClass
from qham.lie import GroupSpec, su2_element
from qham.local import LocalModel
from qham.spaces import conjugacy_class, double, fuse, surface_space
from qham.verify import (VerifierConfig, check_axiom_i, check_axiom_ii, check_axiom_iii, check_facts,
                         convergence_ratio, verify_space)

SU2 = GroupSpec.parse("SU(2)")
CFG = VerifierConfig()


def central_class():
    with pytest.warns(DegenerateClass):
        return conjugacy_class(SU2, np.eye(2))


def test_config_validation():
    with pytest.raises(ValueError):
        VerifierConfig(h=0)
    with pytest.raises(ValueError):
        VerifierConfig(tol_fd=-1)


@pytest.mark.parametrize("make", [
    lambda: conjugacy_class(SU2, su2_element(1.1)),
    lambda: double(SU2),
    lambda: fuse(conjugacy_class(SU2, su2_element(0.7)), conjugacy_class(SU2, su2_element(1.3))),
])
def test_axioms_at_random_points(make, rng):
    space = make()
    for _ in range(3):
        x = space.random_point(rng)
        X = SU2.random_algebra(rng)
        assert check_axiom_i(space, x, CFG) < CFG.tol_fd
        assert check_axiom_ii(space, x, CFG).passed
        assert check_axiom_iii(space, x, X, CFG, analytic=True) < CFG.tol_exact
        assert check_axiom_iii(space, x, X, CFG, analytic=False) < CFG.tol_fd
        assert check_facts(space, x, CFG).passed


def test_axiom_iii_zero_generator(rng):
    space = double(SU2)
    x = space.random_point(rng)
    assert check_axiom_iii(space, x, np.zeros((2, 2), complex), CFG) == 0.0


def test_axiom_i_second_order_convergence(rng):
    space = double(SU2)
    x = space.random_point(rng)
    coarse = check_axiom_i(space, x, CFG, h=1e-3)
    fine = check_axiom_i(space, x, CFG, h=5e-4)
    assert 3.5 < coarse / fine < 4.5


def test_axiom_i_detects_wrong_form(rng):
    """A form that is off by a closed-but-wrong term fails axiom (i) or (iii)."""
    space = double(SU2)

    class Scaled(type(space)):
        def omega_matrix(self, x, V, W):
            return 2.0 * super().omega_matrix(x, V, W)

    bad = Scaled(SU2)
    x = bad.random_point(rng)
    assert check_axiom_i(bad, x, CFG) > 1e-3
    assert check_axiom_iii(bad, x, SU2.random_algebra(rng), CFG) > 1e-3


def test_central_class_vacuous():
    c = central_class()
    x = (np.eye(2, dtype=complex),)
    assert check_axiom_i(c, x, CFG) == 0.0
    ii = check_axiom_ii(c, x, CFG)
    assert ii.passed and ii.dim_ker_omega == 0
    assert check_facts(c, x, CFG).passed
    rep = verify_space(c, VerifierConfig(samples=5))
    assert rep.passed


def test_generic_class_point_has_trivial_kernels(rng):
    c = conjugacy_class(SU2, su2_element(1.1))
    ii = check_axiom_ii(c, c.random_point(rng), CFG)
    assert (ii.dim_ker_omega, ii.dim_ker_ad_plus_id) == (0, 0)


def test_quarter_turn_class_has_kernel_at_generator():
    """At u = diag(i, -i), Ad u has eigenvalues {1, -1, -1}: the kernel of omega is the whole tangent plane."""
    u0 = su2_element(np.pi / 2)
    c = conjugacy_class(SU2, u0)
    spectrum = np.sort(np.linalg.eigvals(SU2.ad_matrix(u0)).real)
    np.testing.assert_allclose(spectrum, [-1, -1, 1], atol=1e-12)
    ii = check_axiom_ii(c, (u0,), CFG)
    assert ii.passed
    assert ii.dim_ker_omega == ii.dim_ker_ad_plus_id == 2
    assert check_facts(c, (u0,), CFG).passed


def test_axiom_ii_dims_chart_independent(rng):
    space = surface_space(SU2, 1, [su2_element(np.pi / 2)])
    x = space.random_point(rng)
    loc = LocalModel(space, x)
    Q = ortho_group.rvs(space.dim, random_state=1)
    rotated = space.from_coords(x, Q.T)
    G = space.omega_matrix(x, rotated, rotated)
    assert linalg.null_space(G).shape[1] == loc.ker_omega.shape[1]


def test_free_point_has_full_momentum_image(rng):
    space = double(SU2)
    x = space.random_point(rng)
    loc = LocalModel(space, x)
    assert loc.isotropy.shape[1] == 0
    assert linalg.rank(loc.J) == SU2.dim
    facts = check_facts(space, x, CFG)
    assert facts.image_dims == (3, 3)


def test_class_lambda_dims_agree_with_axiom_ii():
    u0 = su2_element(np.pi / 2)
    c = conjugacy_class(SU2, u0)
    f = check_facts(c, (u0,), CFG)
    ii = check_axiom_ii(c, (u0,), CFG)
    assert f.lambda_injective and f.lambda_dims == (ii.dim_ker_ad_plus_id, ii.dim_ker_omega)


def test_verify_space_deterministic_and_passes():
    space = surface_space(SU2, 1, [su2_element(np.pi / 2)])
    cfg = VerifierConfig(samples=8, seed=3)
    a, b = verify_space(space, cfg), verify_space(space, cfg)
    assert a.passed, a.flags
    assert a.to_dict() == b.to_dict()
    assert 3.0 <= a.maxima["axiom_i_convergence_ratio"] <= 5.0


@pytest.mark.parametrize("scale", [1.0, 3.7])
def test_axioms_covariant_in_scale(scale):
    g = GroupSpec.parse("SU(2)", scale)
    rep = verify_space(double(g), VerifierConfig(samples=5))
    assert rep.passed, rep.flags


@pytest.mark.parametrize("spec, make", [
    ("SU(3)", lambda g: conjugacy_class(g, np.diag(np.exp([0.3j, 0.5j, -0.8j])))),
    ("U(2)", lambda g: double(g)),
])
def test_axioms_other_groups(spec, make):
    g = GroupSpec.parse(spec)
    rep = verify_space(make(g), VerifierConfig(samples=3))
    assert rep.passed, rep.flags


def test_chart_failure_carries_point(rng):
    space = double(SU2)

    class Leaky(type(space)):
        def chart(self, x, z):
            a, b = super().chart(x, z)
            return (a * (1 + np.linalg.norm(z)), b)

    with pytest.raises(ChartFailure) as info:
        verify_space(Leaky(SU2), VerifierConfig(samples=1))
    assert info.value.point is not None


def test_convergence_ratio():
    assert convergence_ratio([4e-8, 1e-12], [1e-8, 1e-12]) == pytest.approx(4.0)
    assert convergence_ratio([1e-14], [1e-14]) is None
