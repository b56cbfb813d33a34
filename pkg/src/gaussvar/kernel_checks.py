"""Numerical verification of the pointwise kernel bounds and of the
estimates for the local and global parts of the new Riesz transforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.optimize import minimize

from .exponents import ExponentSpec, fitted_p_inf
from .gauss_measure import BallFamily, admissible_ball_family, hyperbolic_radius
from .grids import GridFunction
from .kernels import (KernelFamily, QuadratureConfig, _as_callable, _global_part, _log_radial, kernel_values,
                      omega, pv_apply, psi_phi)
from .norms import classical_norm
from .quadrature import sphere_rule
from .reports import CheckReport, relative_change


def default_alpha(m: int, d: int) -> tuple:
    """Multi-index of order m used for the bound sweeps."""
    if d == 1:
        return (m,)
    a = [0] * d
    a[0] = m - m // 2
    a[1] = m // 2
    return tuple(a)


# --------------------------------------------------------------------------
# Pointwise kernel bounds in the global region
# --------------------------------------------------------------------------

CASES = ("b_nonpositive", "b_positive")


@dataclass(frozen=True)
class PairSampler:
    """x, y uniform in [-box, box]^d, restricted to the global region and a sign of <x, y>."""

    box: float = 5.0
    seed: int = 0

    def sample(self, n: int, d: int, case: str, offset: int = 0) -> tuple[np.ndarray, np.ndarray]:
        rng = np.random.default_rng([self.seed, CASES.index(case), d, offset])
        xs, ys, have = [], [], 0
        while have < n:
            X = rng.uniform(-self.box, self.box, (4 * n, d))
            Y = rng.uniform(-self.box, self.box, (4 * n, d))
            ok = _admissible(X, Y, case)
            xs.append(X[ok])
            ys.append(Y[ok])
            have += int(ok.sum())
        return np.concatenate(xs)[:n], np.concatenate(ys)[:n]


def _admissible(X, Y, case):
    b = np.sum(X * Y, axis=-1)
    glob = np.linalg.norm(X - Y, axis=-1) > hyperbolic_radius(X)
    side = b <= 0 if case == "b_nonpositive" else b > 0
    return glob & side & (np.sum(X * X, -1) + np.sum(Y * Y, -1) > 0)


def log_bound_ratio(X, Y, fam: KernelFamily, eps: float, cfg: QuadratureConfig | None = None) -> np.ndarray:
    """log(|K(x, y)| / bound(x, y)) for each pair, with the bound chosen by the sign of <x, y>.

    b <= 0: bound = e^{eps |x|^2 - |y|^2}
    b > 0:  bound = e^{-(1 - eps) u0} t0^{-d/2} e^{eps (|x|^2 - |y|^2)}
    """
    X = np.atleast_2d(X)
    Y = np.atleast_2d(Y)
    d = X.shape[1]
    s, u0 = kernel_values(X, Y, fam, cfg, "new", log_scale=True)
    from .kernels import _t0_u0

    _, b, t0, _ = _t0_u0(X, Y)
    nx2 = np.sum(X * X, -1)
    ny2 = np.sum(Y * Y, -1)
    with np.errstate(divide="ignore"):
        la = np.log(np.abs(s))
    neg = la - eps * nx2  # the e^{-|y|^2} = e^{-u0} factor cancels
    pos = la - eps * u0 + (d / 2) * np.log(t0) - eps * (nx2 - ny2)
    return np.where(b > 0, pos, neg)


def _polish(fam, eps, cfg, case, box, X, Y, vals, top):
    d = X.shape[1]
    best = -math.inf
    wit = None
    for k in np.argsort(vals)[::-1][:top]:
        def obj(z):
            x, y = z[:d][None, :], z[d:][None, :]
            if np.any(np.abs(z) > box) or not _admissible(x, y, case)[0]:
                return 1e9
            return -float(log_bound_ratio(x, y, fam, eps, cfg)[0])

        res = minimize(obj, np.concatenate([X[k], Y[k]]), method="Nelder-Mead",
                       options={"xatol": 1e-8, "fatol": 1e-10, "maxiter": 400 * d})
        if -res.fun > best:
            best, wit = -res.fun, res.x
    return best, wit


def boundsexp_check(fam: KernelFamily, eps: float = 0.05, n: int = 1000, sampler: PairSampler | None = None,
                    cfg: QuadratureConfig | None = None, polish_top: int = 4, threshold: float = 0.1) -> list[CheckReport]:
    """Fitted C_eps per case on n pairs and on 2n pairs (the first n shared).

    Both samples are followed by a local search from their best pairs, so
    each C_eps estimates the supremum over the sampled box.  A case passes
    when the two fits differ by less than ``threshold``.
    """
    d = fam.dim
    if eps <= 0:
        raise ValueError("eps must be positive")
    sampler = PairSampler() if sampler is None else sampler
    out = []
    for case in CASES:
        if case == "b_positive" and eps >= 1.0 / d:
            raise ValueError("eps < 1/d required for b > 0")
        if case == "b_nonpositive" and eps >= 1.0:
            raise ValueError("eps < 1 required for b <= 0")
        X1, Y1 = sampler.sample(n, d, case)
        X2, Y2 = sampler.sample(n, d, case, offset=1)
        v1 = log_bound_ratio(X1, Y1, fam, eps, cfg)
        v2 = log_bound_ratio(X2, Y2, fam, eps, cfg)
        vall = np.concatenate([v1, v2])
        Xall, Yall = np.concatenate([X1, X2]), np.concatenate([Y1, Y2])
        p1, _ = _polish(fam, eps, cfg, case, sampler.box, X1, Y1, v1, polish_top)
        p2, w2 = _polish(fam, eps, cfg, case, sampler.box, Xall, Yall, vall, polish_top)
        c1 = math.exp(max(float(v1.max()), p1))
        c2 = max(c1, math.exp(max(float(vall.max()), p2)))
        delta = relative_change(c1, c2)
        out.append(CheckReport(
            f"boundsexp_{case}", f"d={d} m={fam.m:g} eps={eps:g} n={n}/{2 * n}", c2, delta,
            bool(math.isfinite(c2) and delta < threshold), 0,
            {"C_half": c1, "raw_max": math.exp(float(vall.max())), "witness": None if w2 is None else w2.tolist()}))
    return out


def phi_modulus_constant(m: float, t_max: float = 0.9, n: int = 2000) -> float:
    """sup over (0, t_max] of |phi_m(t) - phi_m(0)| (1 - t)/t."""
    t = np.linspace(t_max / n, t_max, n)
    _, phi = psi_phi(m, t)
    phi0 = 2.0 ** (-(m - 2) / 2)
    return float(np.max(np.abs(phi - phi0) * (1 - t) / t))


# --------------------------------------------------------------------------
# Global part
# --------------------------------------------------------------------------

def alpha_inf(eps: float, p_inf: float) -> float:
    return (1.0 - eps) / 2.0 - abs(1.0 / p_inf - (1.0 - 3.0 * eps) / 2.0)


def admissible_eps_bound(p_inf: float, d: int) -> float:
    """Upper end of the admissible eps range: min(1 / (2 p'_inf), 1 / d)."""
    p_conj = p_inf / (p_inf - 1.0)
    return min(1.0 / (2.0 * p_conj), 1.0 / d)


def _global_weight_integral(x, f, spec: ExponentSpec, a_inf: float, cfg: QuadratureConfig) -> float:
    """int over |y - x| > hyperbolic radius, |y| <= R of P(x, y) |f(y)| e^{-|y|^2 / p(y)} dy."""
    d = x.size
    Rh = float(hyperbolic_radius(x))
    R = cfg.truncation_radius(x)
    smax = R + float(np.linalg.norm(x))
    if smax <= Rh:
        return 0.0
    s, ws = _log_radial(Rh, smax, cfg.radial_log_width)
    w, ww = sphere_rule(d, cfg.angular_points)
    Y = (x[None, None, :] + s[:, None, None] * w[None, :, :]).reshape(-1, d)
    wt = ((ws * s ** (d - 1))[:, None] * ww[None, :]).reshape(-1)
    keep = np.linalg.norm(Y, axis=-1) <= R
    Y, wt = Y[keep], wt[keep]
    xpy = np.linalg.norm(x + Y, axis=-1)
    xmy = np.linalg.norm(x - Y, axis=-1)
    P = xpy**d * np.exp(-a_inf * xmy * xpy)
    g = np.abs(np.asarray(f(Y), dtype=float)) * np.exp(-np.sum(Y * Y, -1) / spec(Y))
    return float(np.sum(wt * P * g))


def global_bound_check(fam: KernelFamily, spec: ExponentSpec, eps: float, f, sample_x,
                       cfg: QuadratureConfig | None = None, norm_grid: int | None = None,
                       threshold: float = 0.1) -> CheckReport:
    """Fit C in |Gf(x)| <= C [e^{eps|x|^2} ||f||_{p^-} + e^{|x|^2/p(x)} int_{B^c(x)} P |f| e^{-|y|^2/p(y)} dy].

    Also reports D, the largest weighted integral over the sample.
    """
    cfg = QuadratureConfig() if cfg is None else cfg
    d = fam.dim
    p_inf = fitted_p_inf(spec)
    hi = admissible_eps_bound(p_inf, d)
    if not 0.0 < eps < hi:
        raise ValueError(f"eps must lie in (0, {hi:.6g})")
    a_inf = alpha_inf(eps, p_inf)
    fc = _as_callable(f)
    n = norm_grid or {1: 2000, 2: 200}.get(d, 40)
    grid = GridFunction.on_box(fc, (-10.0, 10.0), n, d, "gaussian")
    nf = classical_norm(grid, spec.p_minus)
    xs = np.atleast_2d(np.asarray(sample_x, dtype=float))
    ratios, Ds, G = [], [], []
    for x in xs:
        g, _ = _global_part(x, fam, fc, cfg, "new")
        I = _global_weight_integral(x, fc, spec, a_inf, cfg)
        px = float(spec(x[None, :])[0])
        rhs = math.exp(eps * float(x @ x)) * nf + math.exp(float(x @ x) / px) * I
        G.append(g)
        Ds.append(I)
        ratios.append(0.0 if g == 0 else (abs(g) / rhs if rhs > 0 else math.inf))
    ratios = np.array(ratios)
    C = float(ratios.max()) if ratios.size else 0.0
    C_half = float(ratios[: max(1, ratios.size // 2)].max()) if ratios.size else 0.0
    D = float(max(Ds)) if Ds else 0.0
    return CheckReport("global_bound", f"d={d} m={fam.m:g} eps={eps:g} n={len(xs)}", C,
                       relative_change(C, C_half), bool(math.isfinite(C) and math.isfinite(D)), 0,
                       {"alpha_inf": a_inf, "D": D, "norm_p_minus": nf, "G": G, "C_half": C_half})


# --------------------------------------------------------------------------
# Local part (d = 1)
# --------------------------------------------------------------------------

def _hilbert_piece(g: Callable, a: float, b: float, x: float) -> float:
    """p.v. int_a^b g(y) / (x - y) dy for a < x < b; plain integral otherwise."""
    gx = float(g(np.array([[x]]))[0])
    if a < x < b:
        reg = integrate.quad(lambda y: (float(g(np.array([[y]]))[0]) - gx) / (x - y), a, b, points=[x],
                             limit=200)[0]
        return reg + gx * math.log((x - a) / (b - x))
    return integrate.quad(lambda y: float(g(np.array([[y]]))[0]) / (x - y), a, b, limit=200)[0]


def _hl_maximal_1d(grid_x: np.ndarray, vals: np.ndarray, h: float, x: float) -> float:
    """Non-centred Hardy-Littlewood maximal function of a step function at x (intervals on cell edges)."""
    edges = np.concatenate([grid_x - h / 2, [grid_x[-1] + h / 2]])
    cum = np.concatenate([[0.0], np.cumsum(np.abs(vals) * h)])
    left = edges <= x
    right = edges >= x
    L = np.flatnonzero(left)
    R = np.flatnonzero(right)
    if L.size == 0 or R.size == 0:
        return 0.0
    num = cum[R][None, :] - cum[L][:, None]
    den = edges[R][None, :] - edges[L][:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(den > 0, num / den, 0.0)
    return float(q.max())


def local_domination_check(fam: KernelFamily, f: GridFunction, sample_x, family: BallFamily | None = None,
                           cfg: QuadratureConfig | None = None) -> CheckReport:
    """Fit c in |Lf(x)| <= c sum_{B ni x} (|T(f chi_Bhat)(x)| + M(f chi_Bhat)(x)), d = 1.

    T is the convolution operator with the homogeneous kernel scaled like
    the diagonal of the new kernel, M the Hardy-Littlewood maximal
    operator and Bhat the dilate of each admissible ball.
    """
    if fam.dim != 1:
        raise ValueError("local domination check is implemented for d = 1")
    cfg = QuadratureConfig() if cfg is None else cfg
    if family is None:
        family = admissible_ball_family((-8.0, 8.0), 12, 1)
    fc = f.interpolator()
    om = omega(fam, np.array([[1.0], [-1.0]]))
    scale = 0.5 * 2.0 ** (-(fam.m - 2) / 2)
    w_odd = scale * 0.5 * (om[0] - om[1])
    gx = f.points[:, 0]
    h = float(gx[1] - gx[0])
    xs = np.asarray(sample_x, dtype=float).reshape(-1)
    ratios = []
    for x in xs:
        loc = pv_apply(fam, fc, np.array([x]), cfg, "new").local
        rhs = 0.0
        for k in np.flatnonzero(np.abs(family.centers[:, 0] - x) <= family.radii):
            c, R = family.centers[k, 0], family.dilates[k]
            a, b = c - R, c + R
            T = w_odd * _hilbert_piece(fc, a, b, x) if w_odd != 0 else 0.0
            inside = (gx >= a) & (gx <= b)
            M = _hl_maximal_1d(gx, np.where(inside, f.values, 0.0), h, x)
            rhs += abs(T) + M
        ratios.append(0.0 if loc == 0 else (abs(loc) / rhs if rhs > 0 else math.inf))
    ratios = np.array(ratios)
    c = float(ratios.max()) if ratios.size else 0.0
    c_half = float(ratios[: max(1, ratios.size // 2)].max()) if ratios.size else 0.0
    return CheckReport("local_domination", f"d=1 m={fam.m:g} n={xs.size} grid={gx.size}", c,
                       relative_change(c, c_half), bool(math.isfinite(c)), 0, {"ratios": ratios.tolist()})
