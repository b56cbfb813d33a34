import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussvar.gauss_measure import (GAUSSIAN, Ball, MeasureHandle, admissible_ball_family, dilate_radius,
                                    dyadic_ball_family, far_ball_bound, fit_lower_bound_constant, gaussian_ball_mc,
                                    gaussian_density, hyperbolic_radius, in_local_region, log_gaussian_ball,
                                    log_gaussian_ball_batch, lower_bound_gamma, measure_ball, nearest_point,
                                    sample_balls, validate_lower_bound)

from oracles import load

ORACLE = load()


def test_density_values():
    assert gaussian_density(np.zeros(1)) == pytest.approx(1 / math.sqrt(math.pi))
    assert gaussian_density(np.zeros(2)) == pytest.approx(1 / math.pi)
    assert gaussian_density(np.array([1.0, 1.0])) == pytest.approx(math.exp(-2) / math.pi)


def test_density_integrates_to_one():
    x, w = np.polynomial.legendre.leggauss(200)
    x, w = 8 * x, 8 * w
    assert np.sum(w * gaussian_density(x[:, None])) == pytest.approx(1.0, abs=1e-12)


def test_unit_interval_mass():
    assert measure_ball(GAUSSIAN[1], Ball([0.0], 1.0)) == pytest.approx(0.8427007929, abs=1e-10)


@pytest.mark.parametrize("row", ORACLE["gaussian_ball_1d"])
def test_ball_mass_1d_oracle(row):
    c, r, ref = row
    assert measure_ball(GAUSSIAN[1], Ball([c], r)) == pytest.approx(ref, rel=1e-10, abs=1e-15)


@pytest.mark.parametrize("row", ORACLE["gaussian_ball_2d"])
def test_ball_mass_2d_oracle(row):
    c, r, ref = row
    assert measure_ball(GAUSSIAN[2], Ball(c, r)) == pytest.approx(ref, rel=1e-9)


def test_batch_agrees_with_scalar():
    rng = np.random.default_rng(0)
    c, r = sample_balls(rng, 40, 2, far=8.0, r_range=(1e-2, 5.0))
    batch = log_gaussian_ball_batch(c, r)
    single = np.array([log_gaussian_ball(ci, ri) for ci, ri in zip(c, r)])
    np.testing.assert_allclose(batch, single, rtol=1e-8, atol=1e-10)


def test_mass_at_most_one_and_large_ball():
    assert measure_ball(GAUSSIAN[3], Ball(np.zeros(3), 30.0)) == pytest.approx(1.0, abs=1e-12)
    assert measure_ball(GAUSSIAN[2], Ball([1.0, 2.0], 3.0)) <= 1.0


def test_other_measures():
    b = Ball([0.3, -0.2], 0.5)
    assert measure_ball(MeasureHandle("lebesgue", 2), b) == pytest.approx(math.pi * 0.25)
    pts = np.array([[0.3, -0.2], [0.5, 0.0], [2.0, 2.0]])
    h = MeasureHandle("grid_weighted", 2, pts, np.array([1.0, 2.0, 4.0]))
    assert measure_ball(h, b) == 3.0


def test_invalid_inputs():
    with pytest.raises(ValueError):
        Ball([0.0], 0.0)
    with pytest.raises(ValueError):
        measure_ball(GAUSSIAN[1], Ball([0.0], 1.0), tol=0.0)
    with pytest.raises(ValueError):
        MeasureHandle("grid_weighted", 1, np.zeros((2, 1)), np.array([1.0, -1.0]))


@pytest.mark.parametrize("c,r", [([0.5, 0.5], 0.7), ([2.0, 0.0], 1.0), ([0.0, 0.0, 1.0], 0.8)])
def test_monte_carlo_agrees_with_quadrature(c, r):
    b = Ball(c, r)
    mc = gaussian_ball_mc(b, n=1 << 16, seed=3)
    ref = measure_ball(GAUSSIAN[b.dim], b)
    assert abs(mc.value - ref) <= max(4 * mc.stderr, 1e-3 * ref)
    assert gaussian_ball_mc(b, n=1 << 14, seed=3) == gaussian_ball_mc(b, n=1 << 14, seed=3)


def test_nearest_point_examples():
    q, dist = nearest_point(Ball([3.0, 4.0], 2.0))
    np.testing.assert_allclose(q, [1.8, 2.4])
    assert dist == pytest.approx(3.0)
    q, dist = nearest_point(Ball([0.5, 0.0], 1.0))
    np.testing.assert_allclose(q, 0.0)
    assert dist == 0.0


def test_lower_bound_cases():
    assert lower_bound_gamma(Ball([0.0], 0.5))[0] == "small"
    assert lower_bound_gamma(Ball([0.0, 0.0], 2.0)) == ("near_large", 1.0)
    case, v = lower_bound_gamma(Ball([3.0, 0.0], 1.0))
    assert case == "far_large"
    assert v == pytest.approx(math.exp(-3 * 4.0))


def test_lower_bound_constant_fit_and_validate():
    rng = np.random.default_rng(1)
    c, r = sample_balls(rng, 300, 2)
    fit = fit_lower_bound_constant(c, r)
    assert 0 < fit["c"] <= 1
    c2, r2 = sample_balls(np.random.default_rng(2), 300, 2)
    assert validate_lower_bound(fit["c"], c2, r2)["violations"] == 0


def test_far_ball_bound_regime():
    assert far_ball_bound(Ball([0.5], 0.1)) is None
    b = Ball([4.0, 0.0], 1.0)
    _, q = nearest_point(b)
    expect = math.exp(-q * q) / q * min(1.0, (1.0 / q) ** 0.5)
    assert far_ball_bound(b) == pytest.approx(expect)
    assert measure_ball(GAUSSIAN[2], b) <= 10 * far_ball_bound(b)


def test_hyperbolic_radius():
    assert hyperbolic_radius(np.zeros(2)) == 2.0
    assert hyperbolic_radius(np.array([0.5, 0.0])) == 2.0
    assert hyperbolic_radius(np.array([4.0, 0.0])) == pytest.approx(0.5)
    assert in_local_region(np.array([4.0]), np.array([4.2]))
    assert not in_local_region(np.array([4.0]), np.array([4.5]))


def test_dilate_contains_local_balls():
    rng = np.random.default_rng(4)
    for _ in range(30):
        c = rng.uniform(-6, 6, 2)
        r = rng.uniform(0.05, 1.0)
        R = dilate_radius(c, r)
        x = c + r * rng.uniform(-1, 1, (200, 2)) / math.sqrt(2)
        reach = np.linalg.norm(x - c, axis=1) + hyperbolic_radius(x)
        assert np.all(reach <= R + 1e-12)


@pytest.mark.parametrize("d,depth", [(1, 10), (2, 6)])
def test_admissible_family_covers_box(d, depth):
    fam = admissible_ball_family((-6.0, 6.0), depth, d)
    pts = np.random.default_rng(d).uniform(-6, 6, (500, d))
    dist = np.linalg.norm(pts[:, None, :] - fam.centers[None], axis=-1)
    assert np.all(np.any(dist <= fam.radii[None] + 1e-12, axis=1))
    assert fam.dilates is not None and np.all(fam.dilates >= fam.radii)


def test_dyadic_family_covers_box():
    fam = dyadic_ball_family((-10.0, 10.0), 5, 2)
    pts = np.random.default_rng(0).uniform(-10, 10, (300, 2))
    dist = np.linalg.norm(pts[:, None, :] - fam.centers[None], axis=-1)
    assert np.all(np.any(dist <= fam.radii[None], axis=1))


@settings(max_examples=50, deadline=None)
@given(st.floats(-4, 4), st.floats(0.01, 3.0), st.floats(1.01, 3.0))
def test_property_mass_monotone_in_radius(c, r, s):
    small = measure_ball(GAUSSIAN[1], Ball([c], r))
    big = measure_ball(GAUSSIAN[1], Ball([c], r * s))
    assert small <= big + 1e-15
