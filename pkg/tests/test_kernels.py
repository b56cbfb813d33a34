import math

import numpy as np
import pytest

from gaussvar.grids import GridFunction
from gaussvar.hermite import HermiteExpansion, riesz, synthesize
from gaussvar.kernels import (KernelConvergenceError, KernelFamily, QuadratureConfig, analytic_constant,
                              calibrate_constant, diagonal_coefficient, geometry, homogeneous_kernel, kernel_new,
                              kernel_old, kernel_rform, kernel_values, local_global_split, omega, psi_phi, pv_apply,
                              spherical_mean_omega)
from gaussvar.gauss_measure import hyperbolic_radius

from oracles import load

ORACLE = load()


def test_psi_phi_examples():
    t = np.linspace(0, 0.99, 50)
    psi, phi = psi_phi(2, t)
    np.testing.assert_allclose(psi, 1.0)
    np.testing.assert_allclose(phi, 1 / np.sqrt(1 - t))
    assert psi_phi(4, 0.0)[1] == pytest.approx(0.5)
    for m in (1, 3, 5):
        assert psi_phi(m, 0.0)[1] == pytest.approx(2.0 ** (-(m - 2) / 2))
        assert psi_phi(m, 1e-12)[1] == pytest.approx(2.0 ** (-(m - 2) / 2), rel=1e-9)
    with pytest.raises(ValueError):
        psi_phi(3, 1.0)


def test_psi_matches_direct_formula():
    t = np.array([0.01, 0.3, 0.8])
    m = 3
    direct = (-np.log1p(-t) / t) ** ((m - 2) / 2) * 2 ** (-(m - 2) / 2)
    np.testing.assert_allclose(psi_phi(m, t)[0], direct, rtol=1e-14)


def test_phi_modulus_constant_stable():
    from gaussvar.kernel_checks import phi_modulus_constant

    for m in (1, 3, 4):
        a, b = phi_modulus_constant(m, n=2000), phi_modulus_constant(m, n=8000)
        assert math.isfinite(a) and abs(a - b) <= 0.01 * abs(b) + 1e-12


def test_geometry_examples():
    g = geometry([2.0, 0.0], [3.0, 0.0])
    assert g.u0 == pytest.approx(5.0) and g.t0 == pytest.approx(5 / 9)
    g = geometry([1.0, 0.0], [0.0, 2.0])
    assert g.t0 == 1.0 and g.u0 == 4.0
    assert g.ubar(0.5) == pytest.approx(g.u(0.5) + 1 - 4)
    with pytest.raises(ValueError):
        geometry([0.0], [0.0])


@pytest.mark.parametrize("row", ORACLE["t0_u0"])
def test_geometry_argmin_oracle(row):
    x, y, t, u = row
    g = geometry(x, y)
    assert g.u0 == pytest.approx(u, abs=1e-8)
    assert g.t0 == pytest.approx(t, abs=1e-6)
    assert g.u(g.t0) == pytest.approx(g.u0, abs=1e-10)


@pytest.mark.parametrize("row", ORACLE["kernel_r"])
def test_kernel_matches_r_integral_oracle(row):
    x, y, a, ref = row
    fam = KernelFamily.hermite(a)
    tol = QuadratureConfig().tol
    assert kernel_new(x, y, fam) == pytest.approx(ref, rel=2 * tol, abs=1e-12)
    assert kernel_rform(x, y, fam) == pytest.approx(ref, rel=2 * tol, abs=1e-12)


def test_t_form_and_r_form_agree_old_kernel():
    rng = np.random.default_rng(0)
    for alpha in [(1,), (2,), (1, 1)]:
        fam = KernelFamily.hermite(alpha)
        d = len(alpha)
        for _ in range(5):
            x, y = rng.uniform(-2, 2, d), rng.uniform(-2, 2, d)
            a = kernel_old(x, y, alpha)
            b = kernel_rform(x, y, fam, "old")
            assert a == pytest.approx(b, rel=2e-6, abs=1e-12)


def test_panel_doubling_self_convergence():
    rng = np.random.default_rng(1)
    fam = KernelFamily.hermite((1,))
    cfg = QuadratureConfig()
    X = rng.uniform(-3, 3, (20, 1))
    Y = X + rng.choice([-1, 1], (20, 1)) * rng.uniform(0.3, 2.0, (20, 1))
    a = kernel_values(X, Y, fam, cfg)
    b = kernel_values(X, Y, fam, cfg.refined())
    np.testing.assert_allclose(a, b, rtol=cfg.tol, atol=1e-14)


def test_odd_profile_parity():
    fam = KernelFamily.hermite((1, 0))
    rng = np.random.default_rng(2)
    X, Y = rng.uniform(-2, 2, (10, 2)), rng.uniform(-2, 2, (10, 2))
    np.testing.assert_allclose(kernel_values(-X, -Y, fam), -kernel_values(X, Y, fam), rtol=1e-12, atol=1e-15)
    even = KernelFamily.hermite((2,))
    X1, Y1 = X[:, :1], Y[:, :1]
    np.testing.assert_allclose(kernel_values(-X1, -Y1, even), kernel_values(X1, Y1, even), rtol=1e-12)


def test_diagonal_rejected_and_config_validation():
    fam = KernelFamily.hermite((1,))
    with pytest.raises(ValueError):
        kernel_values([[0.5]], [[0.5]], fam)
    with pytest.raises(ValueError):
        QuadratureConfig(pv_radii=(0.1, 0.2))
    with pytest.raises(ValueError):
        QuadratureConfig(tol=0.0)
    with pytest.raises(ValueError):
        KernelFamily.hermite((0, 0))


def test_kernel_convergence_error_raised_for_coarse_grid():
    fam = KernelFamily.hermite((3,))
    with pytest.raises(KernelConvergenceError):
        kernel_new([0.1], [2.5], fam, QuadratureConfig(t_panels=1, gl_order=2, tol=1e-12))


def test_homogeneous_kernel():
    for alpha in [(1,), (1, 0), (1, 1), (2, 0)]:
        fam = KernelFamily.hermite(alpha)
        d = len(alpha)
        x = np.random.default_rng(3).normal(size=(6, d))
        np.testing.assert_allclose(homogeneous_kernel(fam, 2 * x), homogeneous_kernel(fam, x) / 2**d, rtol=1e-12)
        assert abs(spherical_mean_omega(fam)) <= 1e-10
    fam = KernelFamily.hermite((1,))
    om = omega(fam, np.array([[1.0], [-1.0]]))
    assert om[0] == pytest.approx(-om[1])
    with pytest.raises(ValueError):
        homogeneous_kernel(fam, np.zeros((1, 1)))


def test_kernel_near_diagonal_matches_homogeneous_piece():
    fam = KernelFamily.hermite((1,))
    x = np.array([0.4])
    h = 1e-3
    lead = 0.5 * psi_phi(1, 0.0)[1] * homogeneous_kernel(fam, np.array([[h]]))[0]
    assert kernel_new(x, x + h, fam) == pytest.approx(-lead, rel=2e-2)


def test_family_growth_and_orthogonality():
    fam = KernelFamily.hermite((2, 1))
    g = fam.growth_constants()
    assert math.isfinite(g["C_F"]) and math.isfinite(g["C_grad"])
    assert abs(fam.gaussian_mean()) < 1e-12


def test_analytic_constant():
    assert analytic_constant(2, 1) == pytest.approx(0.5 / math.sqrt(math.pi))
    assert analytic_constant(1, 2) == pytest.approx(2 ** -0.5 / math.pi / math.sqrt(math.pi))


def test_pv_zero_function():
    fam = KernelFamily.hermite((1,))
    res = pv_apply(fam, lambda y: np.zeros(len(y)), np.array([0.3]))
    assert res.value == 0.0


@pytest.mark.parametrize("beta", [1, 2, 4])
def test_pv_matches_spectral_new_riesz_d1(beta):
    fam = KernelFamily.hermite((1,))
    e = HermiteExpansion.basis((beta,))
    target = riesz((1,), e, "new")
    for x in (-1.3, 0.2, 0.9):
        spec = float(synthesize(target, np.array([[x]]))[0])
        val = pv_apply(fam, lambda y: synthesize(e, y), np.array([x])).value
        assert abs(val - spec) <= 5e-3


def test_pv_matches_spectral_second_order_even_kernel():
    fam = KernelFamily.hermite((2,))
    e = HermiteExpansion.basis((2,))
    target = riesz((2,), e, "new")
    for x in (-0.8, 0.5):
        spec = float(synthesize(target, np.array([[x]]))[0])
        res = pv_apply(fam, lambda y: synthesize(e, y), np.array([x]))
        assert res.diagonal != 0.0
        assert abs(res.value - spec) <= 5e-3


def test_pv_exclusion_radius_independence():
    fam = KernelFamily.hermite((1,))
    e = HermiteExpansion.basis((3,))
    f = lambda y: synthesize(e, y)  # noqa: E731
    base = QuadratureConfig()
    more = QuadratureConfig(pv_radii=base.pv_radii + (base.pv_radii[-1] / 2,))
    x = np.array([0.6])
    a, b = pv_apply(fam, f, x, base).value, pv_apply(fam, f, x, more).value
    assert abs(a - b) <= base.pv_tol


def test_local_global_split():
    fam = KernelFamily.hermite((1,))
    x = np.array([0.5])
    R = float(hyperbolic_radius(x))
    outside = lambda y: (np.abs(y[:, 0] - 0.5) > R + 0.5) * np.exp(-((y[:, 0] - 4) ** 2))  # noqa: E731
    L, G = local_global_split(fam, outside, x)
    assert L == 0.0 and G != 0.0
    inside = lambda y: np.maximum(0.0, 1 - ((y[:, 0] - 0.5) / 0.4) ** 2) ** 3  # noqa: E731
    L, G = local_global_split(fam, inside, x)
    assert G == 0.0 and L != 0.0
    e = HermiteExpansion.basis((2,))
    f = lambda y: synthesize(e, y)  # noqa: E731
    L, G = local_global_split(fam, f, x)
    assert L + G == pytest.approx(pv_apply(fam, f, x).value, abs=1e-12)


def test_pv_accepts_grid_function():
    fam = KernelFamily.hermite((1,))
    e = HermiteExpansion.basis((2,))
    g = GridFunction.on_box(lambda y: synthesize(e, y), (-12.0, 12.0), 2400, 1)
    spec = float(synthesize(riesz((1,), e, "new"), np.array([[0.3]]))[0])
    assert pv_apply(fam, g, np.array([0.3])).value == pytest.approx(spec, abs=5e-3)


def test_calibration_reproduces_analytic_constant():
    for variant in ("old", "new"):
        cal = calibrate_constant((1,), variant)
        assert cal["fitted"] == pytest.approx(cal["analytic"], rel=1e-3)
    assert diagonal_coefficient(KernelFamily.hermite((1,))) == pytest.approx(0.0, abs=1e-12)
