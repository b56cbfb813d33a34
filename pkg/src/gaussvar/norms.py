"""Modulars, Luxemburg norms and inequality verifiers on L^{p(.)}(mu).

Integrals are weighted sums with the grid function's own weights, so the
modular of the indicator of a ball agrees with the measure of that ball.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .exponents import ExponentSpec, conjugate_exponent, fitted_p_inf
from .grids import GridFunction
from .quadrature import composite_gauss_legendre, sphere_rule

EPS_NUM = 1e-9


class BracketError(ValueError):
    """The Luxemburg bisection could not bracket a root (non-finite data)."""


def _check_measure(f: GridFunction, measure) -> None:
    if measure is None:
        return
    tag = measure if isinstance(measure, str) else measure.kind
    if tag != f.measure_tag:
        raise ValueError(f"grid function weighted for {f.measure_tag!r}, not {tag!r}")


def modular(f: GridFunction, spec: ExponentSpec, measure=None, lam: float = 1.0) -> float:
    """sum_k w_k (|f_k| / lam)^{p(x_k)}."""
    _check_measure(f, measure)
    p = spec(f.points)
    a = np.abs(f.values) / lam
    with np.errstate(divide="ignore"):
        terms = np.where(a > 0, a ** p, 0.0)
    return float(np.sum(f.weights * terms))


def classical_norm(f: GridFunction, p: float) -> float:
    return float(np.sum(f.weights * np.abs(f.values) ** p) ** (1.0 / p))


def luxemburg_norm(f: GridFunction, spec: ExponentSpec, measure=None, tol: float = 1e-13,
                   max_iter: int = 60) -> float:
    """inf{lam > 0 : modular(f / lam) <= 1} by geometric bisection.

    Returns the upper end of the final bracket, so modular(f / result) <= 1.
    """
    _check_measure(f, measure)
    vals = np.abs(f.values)
    if not np.all(np.isfinite(vals)) or not np.all(np.isfinite(f.weights)):
        raise BracketError("non-finite samples")
    active = (vals > 0) & (f.weights > 0)
    if not np.any(active):
        return 0.0
    g = GridFunction(f.points[active], vals[active], f.weights[active], f.measure_tag)
    p = spec(g.points)
    pmin, pmax = float(p.min()), float(p.max())
    total = float(g.weights.sum())
    hi = float(vals.max()) * max(1.0, total) ** (1.0 / pmin) + 1.0
    for _ in range(200):
        if modular(g, spec, lam=hi) <= 1.0:
            break
        hi *= 2.0
    else:
        raise BracketError("could not find an upper bracket")
    lo = hi / 2.0
    for _ in range(2000):
        if modular(g, spec, lam=lo) > 1.0:
            break
        hi, lo = lo, lo / 2.0
    else:
        raise BracketError("could not find a lower bracket")
    for _ in range(max_iter):
        if hi / lo - 1.0 <= tol / pmax:
            break
        mid = math.sqrt(lo * hi)
        if modular(g, spec, lam=mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return hi


@dataclass(frozen=True)
class HolderResult:
    lhs: float
    rhs: float
    passed: bool


def holder_check(f: GridFunction, g: GridFunction, spec: ExponentSpec, measure=None,
                 eps: float = EPS_NUM) -> HolderResult:
    """int |f g| <= 2 ||f||_{p(.)} ||g||_{p'(.)} (with relative slack eps)."""
    if spec.p_minus <= 1.0:
        raise ValueError("Hoelder check needs p^- > 1")
    lhs = float(np.sum(f.weights * np.abs(f.values * g.values)))
    rhs = 2.0 * luxemburg_norm(f, spec, measure) * luxemburg_norm(g, conjugate_exponent(spec), measure)
    return HolderResult(lhs, rhs, lhs <= rhs * (1.0 + eps))


def extremal_dual(f: GridFunction, spec: ExponentSpec) -> GridFunction:
    """(|f|/||f||)^{p-1}, normalised to unit norm in L^{p'(.)}."""
    lam = luxemburg_norm(f, spec)
    if lam == 0:
        return f.with_values(np.zeros_like(f.values))
    g = f.with_values((np.abs(f.values) / lam) ** (spec(f.points) - 1.0))
    n = luxemburg_norm(g, conjugate_exponent(spec))
    return g.with_values(g.values / n) if n > 0 else g


@dataclass(frozen=True)
class DualEstimate:
    sup_pairing: float
    norm: float
    upper_ok: bool
    lower_ok: bool
    family_size: int
    best_index: int

    @property
    def sandwich_pass(self) -> bool:
        return self.upper_ok and self.lower_ok


def dual_norm_estimate(f: GridFunction, spec: ExponentSpec, dual_family: Sequence[GridFunction] | None = None,
                       include_extremal: bool = True, eps_fam: float = 0.0, eps: float = EPS_NUM) -> DualEstimate:
    """Sup of int |f g| over a finite family with ||g||_{p'(.)} <= 1.

    Members are rescaled to unit norm when needed.  The extremal candidate
    (|f|/||f||)^{p-1} is appended unless ``include_extremal`` is False.
    """
    fam = list(dual_family or [])
    if include_extremal:
        fam.append(extremal_dual(f, spec))
    if not fam:
        raise ValueError("dual family must be nonempty")
    conj = conjugate_exponent(spec)
    best, best_k = 0.0, -1
    for k, g in enumerate(fam):
        n = luxemburg_norm(g, conj)
        if n > 1.0:
            g = g.with_values(g.values / n)
        pair = float(np.sum(f.weights * np.abs(f.values * g.values)))
        if pair > best:
            best, best_k = pair, k
    nf = luxemburg_norm(f, spec)
    upper = best <= 2.0 * nf * (1.0 + eps)
    lower = best >= (0.5 - eps_fam) * nf * (1.0 - eps)
    return DualEstimate(best, nf, upper, lower, len(fam), best_k)


def ball_grid(fn: Callable | float, radius: float, d: int = 2, measure: str = "lebesgue", n_radial: int = 64,
              n_dir: int = 64, center=None) -> GridFunction:
    """Polar product grid on a ball with exact-to-quadrature Lebesgue or Gaussian weights."""
    c = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    panels = max(4, n_radial // 8)
    edges = np.concatenate([[0.0], np.geomspace(min(1.0, radius) * 1e-3, radius, panels)])
    rho, w = composite_gauss_legendre(edges, 16)
    dirs, dw = sphere_rule(d, n_dir)
    pts = (c[None, None, :] + rho[:, None, None] * np.asarray(dirs)[None, :, :]).reshape(-1, d)
    wts = (w * rho ** (d - 1))[:, None] * np.asarray(dw)[None, :]
    wts = wts.reshape(-1)
    if measure == "gaussian":
        wts = wts * np.exp(-np.sum(pts * pts, axis=1)) / math.pi ** (d / 2)
    vals = np.full(len(wts), float(fn)) if np.isscalar(fn) else np.asarray(fn(pts), dtype=float)
    return GridFunction(pts, vals, wts, measure)


@dataclass(frozen=True)
class ChangepResult:
    lhs1: float
    rhs1: float
    lhs2: float
    rhs2: float
    C1: float
    C2: float

    @property
    def fitted_C(self) -> float:
        return max(self.C1, self.C2)


def changep_error_check(G: GridFunction, spec: ExponentSpec, E: Callable[[np.ndarray], np.ndarray] | None = None) -> ChangepResult:
    """Both directions of the exponent-change estimate on E with Lebesgue weights.

        int_E G^{p(y)}   <= C (int_E G^{p_inf} + int_E (e+|y|)^{-d p^-})
        int_E G^{p_inf}  <= C (int_E G^{p(y)} + int_E (e+|y|)^{-d p^-})

    ``E`` is an indicator on points (default: all of G's grid).
    """
    if G.measure_tag != "lebesgue":
        raise ValueError("changep check uses Lebesgue weights")
    if np.any((G.values < 0) | (G.values > 1)):
        raise ValueError("G must take values in [0, 1]")
    mask = np.ones(len(G.values), bool) if E is None else np.asarray(E(G.points), bool)
    w = G.weights * mask
    p = spec(G.points)
    p_inf = fitted_p_inf(spec)
    d = G.dim
    with np.errstate(divide="ignore"):
        gp = np.where(G.values > 0, G.values ** p, 0.0)
        gi = np.where(G.values > 0, G.values ** p_inf, 0.0)
    tail = float(np.sum(w * (math.e + np.linalg.norm(G.points, axis=1)) ** (-d * spec.p_minus)))
    a, b = float(np.sum(w * gp)), float(np.sum(w * gi))
    C1 = a / (b + tail) if a > 0 else 0.0
    C2 = b / (a + tail) if b > 0 else 0.0
    return ChangepResult(a, b + tail, b, a + tail, C1, C2)


def gaussian_bump(center, width: float = 0.5, height: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    c = np.asarray(center, dtype=float)
    return lambda x: height * np.exp(-np.sum((np.asarray(x) - c) ** 2, axis=-1) / width**2)


def random_bump_sum(rng: np.random.Generator, d: int, n_bumps: int = 3, spread: float = 2.0) -> Callable:
    centers = rng.uniform(-spread, spread, (n_bumps, d))
    widths = rng.uniform(0.2, 1.5, n_bumps)
    heights = rng.uniform(-2.0, 2.0, n_bumps)

    def f(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1])
        for c, w, h in zip(centers, widths, heights):
            out = out + h * np.exp(-np.sum((x - c) ** 2, axis=-1) / w**2)
        return out

    return f
