"""Gaussian measure of balls, nearest points, lower bounds and ball families.

The Gaussian measure is gamma_d(dx) = e^{-|x|^2} pi^{-d/2} dx, i.e. the law
of N(0, I/2).  Ball measures are computed by rotating the centre onto the
first axis and integrating exact (d-1)-dimensional slice masses along it.
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy import integrate, special

from .grids import gaussian_interval_mass


class MeasureConvergenceError(RuntimeError):
    """Adaptive quadrature stalled before reaching the requested tolerance."""


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        if not self.radius > 0 or not np.isfinite(self.radius):
            raise ValueError(f"ball radius must be positive and finite, got {self.radius}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.size

    def volume(self) -> float:
        return lebesgue_ball_volume(self.dim, self.radius)

    def contains(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return np.linalg.norm(pts - self.center, axis=-1) <= self.radius


def lebesgue_ball_volume(d: int, r):
    return np.pi ** (d / 2) / math.gamma(d / 2 + 1) * np.asarray(r, dtype=float) ** d


@dataclass(frozen=True)
class BallFamily:
    """Indexed ball family with optional dilated companions."""

    centers: np.ndarray
    radii: np.ndarray
    dilates: np.ndarray | None = None

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        r = np.asarray(self.radii, dtype=float).reshape(-1)
        if c.shape[0] != r.size:
            raise ValueError("centers and radii must have equal length")
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radii", r)
        if self.dilates is not None:
            object.__setattr__(self, "dilates", np.asarray(self.dilates, dtype=float).reshape(-1))

    def __len__(self) -> int:
        return self.radii.size

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    def ball(self, k: int) -> Ball:
        return Ball(self.centers[k], self.radii[k])

    def to_table(self) -> str:
        buf = io.StringIO()
        cols = [f"c{i}" for i in range(self.dim)] + ["radius", "dilate"]
        buf.write("\t".join(cols) + "\n")
        dil = self.dilates if self.dilates is not None else np.full(len(self), np.nan)
        np.savetxt(buf, np.column_stack([self.centers, self.radii, dil]), delimiter="\t", fmt="%.17g")
        return buf.getvalue()


@dataclass(frozen=True)
class MeasureHandle:
    """A measure on R^d: ``gaussian``, ``lebesgue`` or ``grid_weighted``."""

    kind: str
    dim: int
    points: np.ndarray | None = field(default=None, compare=False)
    weights: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("gaussian", "lebesgue", "grid_weighted"):
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if self.kind == "grid_weighted":
            if self.points is None or self.weights is None:
                raise ValueError("grid_weighted measure needs points and weights")
            if np.any(np.asarray(self.weights) < 0):
                raise ValueError("weights must be nonnegative")

    def measure_ball(self, ball: Ball, tol: float = 1e-10) -> float:
        return measure_ball(self, ball, tol)


GAUSSIAN = {d: MeasureHandle("gaussian", d) for d in (1, 2, 3)}


def gaussian_density(x) -> np.ndarray:
    """e^{-|x|^2} / pi^{d/2} at points of shape (..., d)."""
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    return np.exp(-np.sum(x * x, axis=-1)) / np.pi ** (d / 2)


# --------------------------------------------------------------------------
# Ball measures
# --------------------------------------------------------------------------

def _slice_mass(k: int, h):
    # gamma_k of the centred ball of radius h
    if k == 0:
        return np.ones_like(h)
    return special.gammainc(k / 2, np.square(h))


def _log_interval_mass(a: float, b: float) -> float:
    if b <= 0:
        a, b = -b, -a
    if a >= 0:
        # log((erfc(a) - erfc(b)) / 2) without underflow
        la = special.log_ndtr(-math.sqrt(2) * a)
        lb = special.log_ndtr(-math.sqrt(2) * b)
        return min(0.0, float(la + np.log1p(-np.exp(lb - la))))
    return min(0.0, math.log(float(gaussian_interval_mass(a, b))))


def log_gaussian_ball(center, radius: float, tol: float = 1e-10) -> float:
    """log gamma_d(B(center, radius)); stays finite for balls far from the origin."""
    c = np.atleast_1d(np.asarray(center, dtype=float))
    d = c.size
    rho = float(np.linalg.norm(c))
    r = float(radius)
    if d == 1:
        return _log_interval_mass(rho - r, rho + r)
    lo = max(rho - r, 0.0)
    # window of the axial coordinate outside which the integrand is negligible
    ya = max(rho - r, lo - 40.0 if lo > 0 else -40.0)
    yb = min(rho + r, lo + 40.0 if lo > 0 else 40.0)
    if yb <= ya:
        return -np.inf
    sa = np.clip((ya - rho) / r, -1.0, 1.0)
    sb = np.clip((yb - rho) / r, -1.0, 1.0)
    th_a, th_b = math.asin(sa), math.asin(sb)

    def g(th):
        y = rho + r * math.sin(th)
        h = r * math.cos(th)
        return h * math.exp(-(y * y - lo * lo)) * float(_slice_mass(d - 1, h)) / math.sqrt(math.pi)

    pts = []
    th_peak = math.asin(np.clip((lo - rho) / r, -1.0, 1.0))
    if th_a < th_peak < th_b:
        pts.append(th_peak)
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(g, th_a, th_b, points=pts or None, epsabs=0.0,
                                      epsrel=max(tol, 1e-13), limit=200)
        except integrate.IntegrationWarning as exc:
            raise MeasureConvergenceError(str(exc)) from None
    if val <= 0:
        return -np.inf
    return min(0.0, math.log(val) - lo * lo)


def log_gaussian_ball_batch(centers, radii, panels: int = 8, order: int = 16, window: float = 60.0) -> np.ndarray:
    """Vectorised log gamma_d(B) for many balls (fixed-rule version of the slice integral).

    The axial coordinate is restricted to the window y^2 - lo^2 <= ``window``
    around the nearest point and integrated in the angle variable
    y = |c| + r sin(theta) with composite Gauss-Legendre panels.
    """
    from .quadrature import composite_gauss_legendre

    c = np.atleast_2d(np.asarray(centers, dtype=float))
    r = np.asarray(radii, dtype=float).reshape(-1)
    d = c.shape[1]
    rho = np.linalg.norm(c, axis=1)
    if d == 1:
        return np.array([_log_interval_mass(a - b, a + b) for a, b in zip(rho, r)])
    lo = np.maximum(rho - r, 0.0)
    span = np.sqrt(lo * lo + window)
    ya = np.maximum(rho - r, np.where(rho - r > 0, lo, -span))
    yb = np.minimum(rho + r, span)
    th_a = np.arcsin(np.clip((ya - rho) / r, -1.0, 1.0))
    th_b = np.arcsin(np.clip((yb - rho) / r, -1.0, 1.0))
    edges = th_a[:, None] + (th_b - th_a)[:, None] * np.linspace(0.0, 1.0, panels + 1)[None, :]
    th, w = composite_gauss_legendre(edges, order)
    y = rho[:, None] + r[:, None] * np.sin(th)
    h = r[:, None] * np.cos(th)
    g = h * np.exp(-(y * y - (lo * lo)[:, None])) * _slice_mass(d - 1, h) / math.sqrt(math.pi)
    val = np.sum(g * w, axis=1)
    with np.errstate(divide="ignore"):
        return np.minimum(0.0, np.log(val) - lo * lo)


def measure_ball(handle: MeasureHandle, ball: Ball, tol: float = 1e-10, method: str = "auto",
                 seed: int = 0) -> float:
    """Measure of a ball.

    Gaussian balls use exact slice integration for ``method="quad"`` (default
    when d <= 3) and stratified Monte Carlo otherwise.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    if ball.dim != handle.dim:
        raise ValueError("ball dimension does not match measure")
    if handle.kind == "lebesgue":
        return float(ball.volume())
    if handle.kind == "grid_weighted":
        inside = ball.contains(handle.points)
        return float(np.sum(np.asarray(handle.weights)[inside]))
    if method == "auto":
        method = "quad" if handle.dim <= 3 else "mc"
    if method == "quad":
        return float(math.exp(log_gaussian_ball(ball.center, ball.radius, tol)))
    n = max(4096, int(4.0 / tol))
    return gaussian_ball_mc(ball, n=min(n, 1 << 22), seed=seed).value


@dataclass(frozen=True)
class MCResult:
    value: float
    stderr: float
    seed: int
    n: int


def gaussian_ball_mc(ball: Ball, n: int = 1 << 16, seed: int = 0, strata: int = 64) -> MCResult:
    """Conditional Monte Carlo estimate of gamma_d(B).

    The centre is rotated onto the first axis; the axial coordinate is
    integrated exactly and the transverse Gaussian vector is sampled with
    stratification of its first component and antithetic pairs inside
    each stratum.  Stratum k uses the seed sequence (seed, k).
    """
    d = ball.dim
    rho = float(np.linalg.norm(ball.center))
    r = ball.radius
    if d == 1:
        v = float(gaussian_interval_mass(rho - r, rho + r))
        return MCResult(v, 0.0, seed, 0)
    per = max(2, n // strata // 2)
    means = np.empty(strata)
    varis = np.empty(strata)
    for k in range(strata):
        rng = np.random.default_rng([seed, k])
        u = (k + rng.random(per)) / strata
        u = np.concatenate([u, (2 * k + 1) / strata - u])
        z = np.empty((u.size, d - 1))
        z[:, 0] = special.ndtri(u) / math.sqrt(2.0)
        z[:, 1:] = rng.standard_normal((per, d - 2)).repeat(2, axis=0) / math.sqrt(2.0) if d > 2 else z[:, 1:]
        h2 = r * r - np.sum(z * z, axis=1)
        h = np.sqrt(np.maximum(h2, 0.0))
        vals = np.where(h2 > 0, gaussian_interval_mass(rho - h, rho + h), 0.0)
        pair = 0.5 * (vals[:per] + vals[per:])
        means[k] = pair.mean()
        varis[k] = pair.var(ddof=1) / per
    value = float(means.mean())
    stderr = float(math.sqrt(varis.sum()) / strata)
    return MCResult(value, stderr, seed, 2 * per * strata)


# --------------------------------------------------------------------------
# Geometry
# --------------------------------------------------------------------------

def nearest_point(ball: Ball) -> tuple[np.ndarray, float]:
    """Closest point q_B of the closed ball to the origin and its distance."""
    c = ball.center
    nc = float(np.linalg.norm(c))
    if nc <= ball.radius:
        return np.zeros_like(c), 0.0
    q = c * (1.0 - ball.radius / nc)
    return q, nc - ball.radius


LOWER_BOUND_CASES = ("small", "near_large", "far_large")


def lower_bound_gamma(ball: Ball) -> tuple[str, float]:
    """Case tag and variable part of the lower bound for gamma_d(B).

    ``small``:      r <= min(1, 1/|q|)        ->  e^{-|q|^2} |B|
    ``near_large``: |q| < 1 and r > 1         ->  1
    ``far_large``:  |q| >= 1 and r > 1/|q|    ->  e^{-(d+1)|q|^2}
    """
    case, logv = log_lower_bound_gamma(ball)
    return case, math.exp(logv)


def log_lower_bound_gamma(ball: Ball) -> tuple[str, float]:
    _, q = nearest_point(ball)
    r, d = ball.radius, ball.dim
    if r <= min(1.0, 1.0 / q if q > 0 else math.inf):
        return "small", -q * q + math.log(float(ball.volume()))
    if q < 1.0:
        return "near_large", 0.0
    return "far_large", -(d + 1) * q * q


def far_ball_bound(ball: Ball) -> float | None:
    """(e^{-|q|^2}/|q|) (1 ^ (r/|q|)^{(d-1)/2}) in the regime |q| >= 1, r >= 1/(4|q|); else None."""
    _, q = nearest_point(ball)
    if q < 1.0 or ball.radius < 1.0 / (4.0 * q):
        return None
    return math.exp(-q * q) / q * min(1.0, (ball.radius / q) ** ((ball.dim - 1) / 2))


def hyperbolic_radius(x, d: int | None = None):
    """d * min(1, 1/|x|), with value d at the origin."""
    x = np.asarray(x, dtype=float)
    d = x.shape[-1] if d is None else d
    nx = np.linalg.norm(x, axis=-1)
    with np.errstate(divide="ignore"):
        return d * np.minimum(1.0, np.where(nx > 0, 1.0 / nx, np.inf))


def in_local_region(x, y) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.linalg.norm(y - x, axis=-1) <= hyperbolic_radius(x)


def dilate_radius(center, radius, d: int | None = None):
    """Radius of the concentric dilate containing every B(x), x in B."""
    c = np.atleast_2d(np.asarray(center, dtype=float))
    d = c.shape[-1] if d is None else d
    r = np.asarray(radius, dtype=float)
    gap = np.maximum(0.0, np.linalg.norm(c, axis=-1) - r)
    with np.errstate(divide="ignore"):
        m = np.where(gap > 0, np.minimum(1.0, 1.0 / gap), 1.0)
    out = r + d * m
    return out if out.ndim else float(out)


# --------------------------------------------------------------------------
# Ball families
# --------------------------------------------------------------------------

def admissible_ball_family(box: tuple[float, float], depth: int, d: int = 1) -> BallFamily:
    """Local covering of ``box^d`` by balls adapted to the hyperbolic scale.

    Cells are halved recursively (at most ``depth`` times) until their
    half-diagonal is at most 2 min(1, 1/|centre|); each cell contributes its
    circumscribed ball and the dilate from :func:`dilate_radius`.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    lo, hi = box
    centers, radii = [], []
    stack = [(np.full(d, float(lo)), np.full(d, float(hi)), 0)]
    while stack:
        a, b, lev = stack.pop()
        c = 0.5 * (a + b)
        half_diag = 0.5 * float(np.linalg.norm(b - a))
        nc = float(np.linalg.norm(c))
        target = min(1.0, 1.0 / nc) if nc > 0 else 1.0
        if lev >= depth or half_diag <= 2.0 * target:
            centers.append(c)
            radii.append(half_diag)
            continue
        for corner in np.ndindex(*([2] * d)):
            corner = np.asarray(corner)
            na = np.where(corner == 0, a, c)
            nb = np.where(corner == 0, c, b)
            stack.append((na, nb, lev + 1))
    centers = np.array(centers)
    radii = np.array(radii)
    order = np.lexsort(tuple(centers.T[::-1]) + (radii,))
    centers, radii = centers[order], radii[order]
    return BallFamily(centers, radii, dilate_radius(centers, radii, d))


def dyadic_ball_family(box: tuple[float, float], levels: int, d: int = 1, overlap: float = 1.0) -> BallFamily:
    """Multi-scale family: at level k, balls of radius s_k on a grid of spacing s_k.

    s_k = (hi - lo) / 2^{k+1} * overlap-adjusted; with ``overlap`` >= 1 each
    ball of radius s contains every ball of radius <= s/4 centred in its
    grid cell, so the family supremum is comparable to the full one.
    """
    lo, hi = box
    L = hi - lo
    centers, radii = [], []
    for k in range(levels + 1):
        s = L / 2 ** (k + 1)
        n = 2 ** (k + 1) + 1
        ax = np.linspace(lo, hi, n)
        mesh = np.meshgrid(*([ax] * d), indexing="ij")
        pts = np.stack([m.reshape(-1) for m in mesh], axis=-1)
        centers.append(pts)
        radii.append(np.full(pts.shape[0], s * overlap * math.sqrt(d)))
    return BallFamily(np.concatenate(centers), np.concatenate(radii))


def sample_balls(rng: np.random.Generator, n: int, d: int, box: float = 5.0, far: float = 20.0,
                 r_range: tuple[float, float] = (1e-4, 1e2), far_fraction: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """Log-uniform radii; centres uniform in [-box, box]^d or in a far shell up to ``far``."""
    lr = rng.uniform(math.log(r_range[0]), math.log(r_range[1]), n)
    radii = np.exp(lr)
    n_far = int(round(far_fraction * n))
    near = rng.uniform(-box, box, (n - n_far, d))
    dirs = rng.standard_normal((n_far, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    rad = rng.uniform(box, far, n_far)
    centers = np.concatenate([near, dirs * rad[:, None]])
    return centers, radii


def log_measure_ratio(centers: np.ndarray, radii: np.ndarray) -> tuple[list[str], np.ndarray]:
    """Per ball: case tag and log(gamma_d(B) / variable part)."""
    tags, vals = [], np.empty(len(radii))
    for k, (c, r) in enumerate(zip(centers, radii)):
        b = Ball(c, r)
        tag, lv = log_lower_bound_gamma(b)
        tags.append(tag)
        vals[k] = log_gaussian_ball(c, r) - lv
    return tags, vals


def fit_lower_bound_constant(centers: np.ndarray, radii: np.ndarray, polish: bool = True,
                             far: float = 20.0) -> dict:
    """Fit one c with gamma_d(B) >= c * variable_part(B) on a calibration set.

    The ratio depends only on (|c_B|, r_B).  The sample minimum of each case
    is polished by a bounded local search over that case's region, so the
    fitted c is the infimum over the sampled domain rather than over the
    sample alone.
    """
    from scipy.optimize import minimize

    d = centers.shape[1]
    tags, lr = log_measure_ratio(centers, radii)
    tags = np.array(tags)
    best = {}
    for case in LOWER_BOUND_CASES:
        sel = np.flatnonzero(tags == case)
        if sel.size == 0:
            continue
        k = sel[np.argmin(lr[sel])]
        val = float(lr[k])
        if polish:
            e1 = np.zeros(d)
            e1[0] = 1.0
            rho0 = float(np.linalg.norm(centers[k]))
            r0 = float(radii[k])

            def obj(p, case=case):
                rho, lrad = p
                r = math.exp(lrad)
                if rho < 0 or rho > far + 1e-12 or not 1e-4 <= r <= 1e2:
                    return 1e9
                b = Ball(rho * e1, r)
                tag, lv = log_lower_bound_gamma(b)
                if tag != case:
                    return 1e9
                return log_gaussian_ball(b.center, r) - lv

            res = minimize(obj, [rho0, math.log(r0)], method="Nelder-Mead",
                           options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 2000})
            val = min(val, float(res.fun))
        best[case] = val
    log_c = min(best.values())
    return {"c": math.exp(log_c), "log_c": log_c, "per_case": {k: math.exp(v) for k, v in best.items()}}


def validate_lower_bound(c: float, centers: Iterable, radii: Iterable, slack: float = 1e-9) -> dict:
    centers = np.asarray(centers)
    radii = np.asarray(radii)
    tags, lr = log_measure_ratio(centers, radii)
    viol = np.flatnonzero(lr < math.log(c) - slack)
    counts = {t: tags.count(t) for t in LOWER_BOUND_CASES}
    return {"violations": int(viol.size), "min_log_ratio": float(lr.min()), "case_counts": counts,
            "witnesses": [(centers[i].tolist(), float(radii[i]), float(lr[i])) for i in viol[:10]]}
