import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussvar.grids import GridFunction
from gaussvar.hermite import (DEFAULT_DEGREE_CAP, HermiteExpansion, QuadratureDegreeError, TruncationError,
                              analyze, apply_delta, apply_delta_star, apply_ou, fractional_integral, hermite_eval,
                              hermite_multi, hermite_norm_sq, max_coeff_error, multi_indices, project_constants_out,
                              random_expansion, riesz, semigroup, synthesize)

from oracles import load

ORACLE = load()


def test_hermite_eval_matches_reference_series():
    for n, xs, vals in ORACLE["hermite"]:
        np.testing.assert_allclose(hermite_eval(n, np.array(xs)), vals, rtol=1e-13, atol=1e-12)


def test_hermite_small_values():
    assert hermite_eval(0, 3.7) == 1.0
    assert hermite_eval(2, 1.0) == pytest.approx(2.0)


def test_orthogonality_by_quadrature():
    x, w = np.polynomial.hermite.hermgauss(30)
    w = w / math.sqrt(math.pi)
    for m in range(9):
        for n in range(9):
            ip = np.sum(w * hermite_eval(m, x) * hermite_eval(n, x))
            expect = hermite_norm_sq((m,)) if m == n else 0.0
            assert ip == pytest.approx(expect, rel=1e-12, abs=1e-9)


def test_norm_squares():
    assert hermite_norm_sq((0, 0)) == 1.0
    assert hermite_norm_sq((2,)) == 8.0
    assert hermite_norm_sq((1, 1)) == 4.0
    with pytest.raises(OverflowError):
        hermite_norm_sq((400,))


def test_multi_indices_graded():
    idx = multi_indices(2, 3)
    assert len(idx) == 10
    assert [sum(a) for a in idx] == sorted(sum(a) for a in idx)


def test_delta_examples():
    assert apply_delta(0, HermiteExpansion.basis((0,))).coeffs == {}
    e = apply_delta(0, HermiteExpansion.basis((2,)))
    assert e[(1,)] == pytest.approx(math.sqrt(2))
    e = apply_delta(0, HermiteExpansion.basis((2, 3)))
    assert e[(1, 3)] == pytest.approx(math.sqrt(2))


def test_delta_matches_finite_difference():
    # delta = (1/sqrt 2) d/dx on the normalised basis
    x = np.linspace(-1.5, 1.5, 7)
    h = 1e-5
    n = 3
    norm = math.sqrt(hermite_norm_sq((n,)))
    fd = (hermite_eval(n, x + h) - hermite_eval(n, x - h)) / (2 * h) / norm / math.sqrt(2)
    e = apply_delta(0, HermiteExpansion.basis((n,)))
    np.testing.assert_allclose(synthesize(e, x[:, None]), fd, rtol=1e-7)


def test_delta_star_examples():
    e = apply_delta_star(0, HermiteExpansion.basis((1,)))
    assert e[(2,)] == pytest.approx(math.sqrt(2))
    with pytest.raises(TruncationError):
        apply_delta_star(0, HermiteExpansion.basis((2,)), grow=False)


def test_delta_star_is_weighted_adjoint_derivative():
    # delta* g = -(1/sqrt 2) e^{x^2} d/dx (e^{-x^2} g)
    x = np.linspace(-1.2, 1.2, 5)
    g = lambda t: synthesize(HermiteExpansion.basis((1,)), t[:, None])  # noqa: E731
    h = 1e-5
    fd = -(np.exp(-(x + h) ** 2) * g(x + h) - np.exp(-(x - h) ** 2) * g(x - h)) / (2 * h)
    fd = fd * np.exp(x**2) / math.sqrt(2)
    e = apply_delta_star(0, HermiteExpansion.basis((1,)))
    np.testing.assert_allclose(synthesize(e, x[:, None]), fd, rtol=1e-7, atol=1e-8)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_ladder_algebra(d):
    rng = np.random.default_rng(d)
    N = DEFAULT_DEGREE_CAP[d]
    for _ in range(20):
        e = random_expansion(d, N, rng)
        for i in range(d):
            comm = apply_delta(i, apply_delta_star(i, e)) - apply_delta_star(i, apply_delta(i, e))
            assert max_coeff_error(comm.with_cap(N + 1), e.with_cap(N + 1)) <= 1e-13 * max(1, e.max_abs())
        L = HermiteExpansion(d, N, {})
        for i in range(d):
            L = L + apply_delta_star(i, apply_delta(i, e)).with_cap(N)
        assert max_coeff_error(L, apply_ou(e, "L")) <= 1e-13 * N
        assert max_coeff_error(apply_ou(e, "L_bar"), apply_ou(e, "L") + e) <= 1e-13


def test_adjointness_on_coefficients():
    rng = np.random.default_rng(5)
    e = random_expansion(2, 6, rng)
    f = random_expansion(2, 6, rng)
    for i in range(2):
        de = apply_delta(i, e)
        dsf = apply_delta_star(i, f)
        lhs = sum(c * f[a] for a, c in de.coeffs.items())
        rhs = sum(e[a] * c for a, c in dsf.coeffs.items())
        assert lhs == pytest.approx(rhs, rel=1e-13)


def test_ou_and_semigroup():
    assert apply_ou(HermiteExpansion.basis((0,)), "L").coeffs == {}
    assert apply_ou(HermiteExpansion.basis((1, 2)), "L")[(1, 2)] == 3.0
    rng = np.random.default_rng(2)
    e = random_expansion(2, 6, rng)
    assert max_coeff_error(semigroup(0.0, e), e) == 0.0
    lim = semigroup(math.inf, e)
    assert set(lim.coeffs) <= {(0, 0)}
    assert max_coeff_error(semigroup(0.3, semigroup(0.4, e)), semigroup(0.7, e)) <= 1e-15


def test_fractional_integrals():
    rng = np.random.default_rng(3)
    e = random_expansion(2, 8, rng)
    assert max_coeff_error(fractional_integral(0.0, e, "new"), e) == 0.0
    assert max_coeff_error(fractional_integral(0.0, e, "old"), project_constants_out(e)) == 0.0
    assert fractional_integral(0.5, HermiteExpansion.basis((0,)), "new")[(0,)] == 1.0
    for v in ("old", "new"):
        lhs = fractional_integral(0.3, fractional_integral(0.45, e, v), v)
        assert max_coeff_error(lhs, fractional_integral(0.75, e, v)) <= 1e-13


def test_first_order_riesz_closed_forms():
    b = (2, 1)
    r = riesz((1, 0), HermiteExpansion.basis(b), "old")
    assert r[(1, 1)] == pytest.approx(math.sqrt(2 / 3))
    r = riesz((1, 0), HermiteExpansion.basis(b), "new")
    assert r[(3, 1)] == pytest.approx(math.sqrt(3 / 4))
    assert riesz((1,), HermiteExpansion.basis((0,)), "old").coeffs == {}


def test_riesz_matches_ladder_composition():
    rng = np.random.default_rng(9)
    e = random_expansion(2, 6, rng)
    for i in range(2):
        ei = tuple(int(j == i) for j in range(2))
        old = apply_delta(i, fractional_integral(0.5, e, "old"))
        new = apply_delta_star(i, fractional_integral(0.5, e, "new"))
        assert max_coeff_error(riesz(ei, e, "old"), old) <= 1e-14
        assert max_coeff_error(riesz(ei, e, "new"), new) <= 1e-14


def test_new_riesz_truncation_signal():
    with pytest.raises(TruncationError):
        riesz((1,), HermiteExpansion.basis((4,)), "new", grow=False)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_identity_decomposition(d):
    rng = np.random.default_rng(100 + d)
    N = DEFAULT_DEGREE_CAP[d]
    for _ in range(10):
        e = random_expansion(d, N, rng)
        acc = HermiteExpansion(d, N + 1, {})
        for i in range(d):
            ei = tuple(int(j == i) for j in range(d))
            acc = acc + riesz(ei, riesz(ei, e, "old"), "new")
        assert max_coeff_error(acc, project_constants_out(e).with_cap(N + 1)) <= 1e-13


def test_synthesize_and_analyze():
    one = HermiteExpansion.basis((0, 0))
    np.testing.assert_allclose(synthesize(one, np.random.default_rng(0).normal(size=(5, 2))), 1.0)
    a = analyze(lambda x: np.ones(x.shape[0]), 1, 4)
    assert a[(0,)] == pytest.approx(1.0, abs=1e-13)
    h2 = analyze(lambda x: hermite_multi((2,), x) / math.sqrt(8), 1, 6)
    assert h2[(2,)] == pytest.approx(1.0, abs=1e-12)
    assert max(abs(c) for a_, c in h2.coeffs.items() if a_ != (2,)) < 1e-12


def test_round_trip_d2_N8():
    rng = np.random.default_rng(11)
    e = random_expansion(2, 8, rng)
    back = analyze(lambda x: synthesize(e, x), 2, 8)
    assert max_coeff_error(back, e) <= 1e-10


def test_analyze_rejects_low_degree_quadrature():
    with pytest.raises(QuadratureDegreeError):
        analyze(lambda x: np.ones(x.shape[0]), 1, 8, n_quad=4)


def test_analyze_grid_function():
    e = HermiteExpansion(1, 3, {(1,): 0.5, (3,): -0.25})
    g = GridFunction.on_box(lambda x: synthesize(e, x), (-7.0, 7.0), 4000, 1, "gaussian")
    back = analyze(g, 1, 3, gram_tol=1e-3)
    assert max_coeff_error(back, e) < 1e-3


def test_records_round_trip():
    e = random_expansion(3, 4, np.random.default_rng(1))
    assert HermiteExpansion.from_records(e.to_records()) == e


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**31 - 1))
def test_property_identity_on_random_expansions(d, seed):
    N = DEFAULT_DEGREE_CAP[d]
    e = random_expansion(d, N, np.random.default_rng(seed), zero_constant=True)
    acc = HermiteExpansion(d, N + 1, {})
    for i in range(d):
        ei = tuple(int(j == i) for j in range(d))
        acc = acc + riesz(ei, riesz(ei, e, "old"), "new")
    assert max_coeff_error(acc, e.with_cap(N + 1)) <= 1e-13
