"""Variable exponents p(.) and the exponent-class predicates.

Exponents are closed-form registry kinds.  All radial kinds are monotone in
|x| (piecewise linear for tables), and the step kind is constant on two
half-spaces, so the range of p over any ball is computed exactly rather
than by sampling.  A sampling estimator is kept as an independent check.

Condition checks return a :class:`~gaussvar.reports.ConditionReport` whose
verdict compares the fitted constant on a dense sample with the one on a
half-density sample (half the points, half the far-field extent and half
the refinement depth).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .gauss_measure import MeasureHandle, lebesgue_ball_volume, log_gaussian_ball_batch
from .quadrature import composite_gauss_legendre, sphere_rule
from .reports import ConditionReport, relative_change, stable

KINDS = (
    "constant",
    "p_inf_plus_inverse_square",
    "p_inf_plus_inverse_log",
    "p_inf_plus_inverse_power",
    "radial_table",
    "step_jump",
)
RADIAL_KINDS = KINDS[:5]


@dataclass(frozen=True)
class ExponentSpec:
    """Closed-form exponent p(x) = clip(g(x), p_lo, p_hi), optionally transformed.

    ``divisor`` rescales to p / divisor (e.g. p / p^-) and ``conjugate``
    replaces the result by its Hoelder conjugate p / (p - 1).

    Parameters by kind:
      constant                   p
      p_inf_plus_inverse_square  p_inf, c          p_inf + c / |x|^2
      p_inf_plus_inverse_log     p_inf, c          p_inf + c / log(e + |x|)
      p_inf_plus_inverse_power   p_inf, c, k, shift   p_inf + c / (shift + |x|)^k
      radial_table               radii, values     piecewise linear in |x|, flat outside
      step_jump                  normal, offset, p_left, p_right
    """

    kind: str
    params: dict
    clip_range: tuple
    dim: int = 2
    conjugate: bool = False
    divisor: float = 1.0
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown exponent kind {self.kind!r}")
        lo, hi = (float(v) for v in self.clip_range)
        if not (1.0 <= lo <= hi < math.inf):
            raise ValueError("clip_range must satisfy 1 <= p_lo <= p_hi < inf")
        object.__setattr__(self, "clip_range", (lo, hi))
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.divisor <= 0:
            raise ValueError("divisor must be positive")
        if self.conjugate and self._base_bounds()[0] / self.divisor <= 1.0:
            raise ValueError("conjugate exponent needs p^- > 1")

    # ---- evaluation -------------------------------------------------------

    def _g(self, rho):
        p = self.params
        rho = np.asarray(rho, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "constant":
                return np.full(rho.shape, float(p["p"]))
            if self.kind == "p_inf_plus_inverse_square":
                return p["p_inf"] + p["c"] / rho**2
            if self.kind == "p_inf_plus_inverse_log":
                return p["p_inf"] + p["c"] / np.log(math.e + rho)
            if self.kind == "p_inf_plus_inverse_power":
                return p["p_inf"] + p["c"] / (p.get("shift", 0.0) + rho) ** p["k"]
            if self.kind == "radial_table":
                return np.interp(rho, p["radii"], p["values"])
        raise AssertionError

    def _clip(self, v):
        v = np.where(np.isnan(v), self.params.get("p_inf", np.nan), v)
        return np.clip(v, *self.clip_range)

    def _post(self, v):
        v = np.asarray(v, dtype=float) / self.divisor
        return v / (v - 1.0) if self.conjugate else v

    def base(self, x) -> np.ndarray:
        """Clipped closed form before divisor / conjugation."""
        x = np.asarray(x, dtype=float)
        if self.kind == "step_jump":
            n = np.asarray(self.params["normal"], dtype=float)
            side = x @ (n / np.linalg.norm(n)) >= self.params.get("offset", 0.0)
            return self._clip(np.where(side, self.params["p_right"], self.params["p_left"]).astype(float))
        return self._clip(self._g(np.linalg.norm(x, axis=-1)))

    def __call__(self, x) -> np.ndarray:
        return self._post(self.base(x))

    # ---- analytic metadata ------------------------------------------------

    def _base_radial_range(self, a, b):
        """Range of the clipped radial profile over |x| in [a, b] (b may be inf)."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        ga = self._clip(self._g(a))
        gb = np.where(np.isinf(b), self._clip(self._limit()), self._clip(self._g(np.where(np.isinf(b), 0.0, b))))
        lo, hi = np.minimum(ga, gb), np.maximum(ga, gb)
        if self.kind == "radial_table":
            for rk in self.params["radii"]:
                inside = (a < rk) & (rk < b)
                gk = self._clip(self._g(rk))
                lo = np.where(inside, np.minimum(lo, gk), lo)
                hi = np.where(inside, np.maximum(hi, gk), hi)
        return lo, hi

    def _limit(self) -> float:
        if self.kind == "constant":
            return float(self.params["p"])
        if self.kind == "radial_table":
            return float(self.params["values"][-1])
        if self.kind == "step_jump":
            return math.nan
        return float(self.params["p_inf"])

    def _post_range(self, lo, hi):
        a, b = self._post(lo), self._post(hi)
        return np.minimum(a, b), np.maximum(a, b)

    def _base_bounds(self) -> tuple[float, float]:
        if self.kind == "step_jump":
            v = self._clip(np.array([self.params["p_left"], self.params["p_right"]], dtype=float))
            return float(v.min()), float(v.max())
        lo, hi = self._base_radial_range(0.0, np.inf)
        return float(lo), float(hi)

    @property
    def p_minus(self) -> float:
        lo, hi = self._post_range(*self._base_bounds())
        return float(lo)

    @property
    def p_plus(self) -> float:
        lo, hi = self._post_range(*self._base_bounds())
        return float(hi)

    @property
    def p_inf(self) -> float | None:
        """Limit at infinity, kept only when the clip is inactive there."""
        lim = self._limit()
        lo, hi = self.clip_range
        if math.isnan(lim) or not lo <= lim <= hi:
            return None
        return float(self._post(lim))

    def ball_range(self, centers, radii) -> tuple[np.ndarray, np.ndarray]:
        """Exact (p^-_B, p^+_B) over open balls B(centers[k], radii[k])."""
        c = np.atleast_2d(np.asarray(centers, dtype=float))
        r = np.asarray(radii, dtype=float).reshape(-1)
        if self.kind == "step_jump":
            n = np.asarray(self.params["normal"], dtype=float)
            n = n / np.linalg.norm(n)
            s = c @ n - self.params.get("offset", 0.0)
            pl, pr = (float(self._clip(np.float64(v))) for v in (self.params["p_left"], self.params["p_right"]))
            lo = np.where(s >= r, pr, np.where(s <= -r, pl, min(pl, pr)))
            hi = np.where(s >= r, pr, np.where(s <= -r, pl, max(pl, pr)))
        else:
            rho = np.linalg.norm(c, axis=1)
            lo, hi = self._base_radial_range(np.maximum(rho - r, 0.0), rho + r)
        return self._post_range(lo, hi)

    def exterior_range(self, rho) -> tuple[np.ndarray, np.ndarray]:
        """Range of p over {|y| >= rho}."""
        rho = np.asarray(rho, dtype=float)
        if self.kind == "step_jump":
            lo, hi = self._base_bounds()
            return self._post_range(np.full(rho.shape, lo), np.full(rho.shape, hi))
        return self._post_range(*self._base_radial_range(rho, np.full(rho.shape, np.inf)))

    # ---- serialisation ----------------------------------------------------

    def to_record(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params), "clip_range": list(self.clip_range),
                "dim": self.dim, "conjugate": self.conjugate, "divisor": self.divisor, "name": self.name}

    @classmethod
    def from_record(cls, rec: dict) -> "ExponentSpec":
        return cls(rec["kind"], dict(rec["params"]), tuple(rec["clip_range"]), int(rec.get("dim", 2)),
                   bool(rec.get("conjugate", False)), float(rec.get("divisor", 1.0)), rec.get("name", ""))


def eval_exponent(spec: ExponentSpec, x) -> np.ndarray:
    return spec(x)


def conjugate_exponent(spec: ExponentSpec) -> ExponentSpec:
    """p' = p/(p-1); an involution on specs."""
    if spec.p_minus <= 1.0:
        raise ValueError("conjugate exponent needs p^- > 1")
    name = spec.name[:-1] if spec.name.endswith("'") else (spec.name + "'" if spec.name else "")
    return replace(spec, conjugate=not spec.conjugate, name=name)


def scaled_exponent(spec: ExponentSpec, s: float) -> ExponentSpec:
    """p / s (used for q = p / p^-)."""
    if spec.conjugate:
        raise ValueError("scale before conjugating")
    return replace(spec, divisor=spec.divisor * s, name=f"{spec.name}/{s:g}")


# --------------------------------------------------------------------------
# Registry
# --------------------------------------------------------------------------

def _registry(d: int = 2) -> dict[str, ExponentSpec]:
    specs = [
        ExponentSpec("constant", {"p": 2.0}, (2.0, 2.0), d, name="const2"),
        ExponentSpec("constant", {"p": 4.0}, (4.0, 4.0), d, name="const4"),
        ExponentSpec("constant", {"p": 1.5}, (1.5, 1.5), d, name="const1.5"),
        ExponentSpec("p_inf_plus_inverse_square", {"p_inf": 2.0, "c": 1.0}, (1.5, 3.0), d, name="inv_square"),
        ExponentSpec("p_inf_plus_inverse_square", {"p_inf": 3.0, "c": -2.0}, (1.5, 4.0), d, name="inv_square_neg"),
        ExponentSpec("radial_table", {"radii": [0.0, 1.0, 2.0, 4.0], "values": [2.5, 1.8, 3.0, 2.2]},
                     (1.5, 3.5), d, name="radial_table"),
        ExponentSpec("p_inf_plus_inverse_power", {"p_inf": 2.0, "c": 1.0, "k": 3.0, "shift": 0.0},
                     (1.5, 3.0), d, name="inv_power3"),
        ExponentSpec("p_inf_plus_inverse_log", {"p_inf": 2.0, "c": 1.0}, (1.5, 3.0), d, name="inv_log"),
        ExponentSpec("p_inf_plus_inverse_power", {"p_inf": 2.0, "c": 1.0, "k": 1.0, "shift": 0.0},
                     (1.5, 3.0), d, name="inv_power1"),
        ExponentSpec("p_inf_plus_inverse_power", {"p_inf": 2.0, "c": 1.0, "k": 1.0, "shift": math.e},
                     (1.5, 3.0), d, name="lip_shift"),
        ExponentSpec("step_jump", {"normal": [1.0] + [0.0] * (d - 1), "offset": 0.0, "p_left": 2.0, "p_right": 3.0},
                     (1.5, 3.0), d, name="step_jump"),
    ]
    return {s.name: s for s in specs}


REGISTRY = _registry(2)


def registry(d: int = 2) -> dict[str, ExponentSpec]:
    return REGISTRY if d == 2 else _registry(d)


def get_spec(name: str, d: int = 2) -> ExponentSpec:
    reg = registry(d)
    if name not in reg:
        raise KeyError(f"unknown exponent {name!r}; known: {', '.join(reg)}")
    return reg[name]


# --------------------------------------------------------------------------
# Sampling oscillation estimator (independent of ball_range)
# --------------------------------------------------------------------------

def sampled_ball_range(spec: ExponentSpec, center, radius: float, n_per_dim: int = 64,
                       refine: bool = True) -> tuple[float, float]:
    """Estimate (p^-_B, p^+_B) from a grid of 64 points per dimension plus local refinement."""
    c = np.asarray(center, dtype=float)
    d = c.size
    ax = np.linspace(-1.0, 1.0, n_per_dim)
    mesh = np.stack([m.reshape(-1) for m in np.meshgrid(*([ax] * d), indexing="ij")], axis=-1)
    mesh = mesh[np.linalg.norm(mesh, axis=1) < 1.0]
    if d > 1:
        w, _ = sphere_rule(d, 4 * n_per_dim)
        mesh = np.concatenate([mesh, (1 - 1e-9) * np.asarray(w)])
    else:
        mesh = np.concatenate([mesh, [[1 - 1e-9], [-1 + 1e-9]]])
    pts = c + radius * mesh
    vals = spec(pts)
    lo, hi = float(vals.min()), float(vals.max())
    if refine:
        for sign, k in ((1.0, int(np.argmin(vals))), (-1.0, int(np.argmax(vals)))):
            def obj(z, sign=sign):
                z = np.asarray(z)
                nz = np.linalg.norm(z)
                if nz >= 1.0:
                    z = z / nz * (1 - 1e-9)
                return sign * float(spec(c + radius * z))

            res = minimize(obj, mesh[k], method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14})
            v = sign * res.fun
            lo, hi = min(lo, v), max(hi, v)
    return lo, hi


# --------------------------------------------------------------------------
# Samplers
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BallSampler:
    """Log-uniform radii, centres uniform in [-box, box]^d or in a far shell.

    The half-density variant halves the count, the far extent and the
    number of radius decades below 1.
    """

    box: float = 5.0
    far: float = 20.0
    r_min: float = 1e-4
    r_max: float = 1e2
    far_fraction: float = 0.3
    seed: int = 0

    def bounds(self, half: bool = False) -> tuple[float, float, float]:
        far = self.far / 2 if half else self.far
        r_min = math.sqrt(self.r_min) if half else self.r_min
        return far, r_min, self.r_max

    def sample(self, n: int, d: int, half: bool = False) -> tuple[np.ndarray, np.ndarray]:
        far, r_min, r_max = self.bounds(half)
        box = min(self.box, far / math.sqrt(d))
        rng = np.random.default_rng([self.seed, int(half)])
        radii = np.exp(rng.uniform(math.log(r_min), math.log(r_max), n))
        n_far = int(round(self.far_fraction * n))
        near = rng.uniform(-box, box, (n - n_far, d))
        dirs = rng.standard_normal((n_far, d))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        rad = rng.uniform(0.0, far, n_far)
        return np.concatenate([near, dirs * rad[:, None]]), radii


@dataclass(frozen=True)
class PairSampler:
    """Pairs with 0 < |x - y| < 1/2, distances log-uniform down to ``min_dist``."""

    box: float = 5.0
    min_dist: float = 1e-6
    seed: int = 0

    def sample(self, n: int, d: int, half: bool = False) -> tuple[np.ndarray, np.ndarray]:
        rng = np.random.default_rng([self.seed, 7, int(half)])
        x = rng.uniform(-self.box, self.box, (n, d))
        dirs = rng.standard_normal((n, d))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        dist = np.exp(rng.uniform(math.log(self.min_dist), math.log(0.5), n)) * (1 - 1e-12)
        return x, x + dist[:, None] * dirs


def _verdict(full: float, half: float, positive: bool = False, threshold: float = 0.1) -> bool:
    ok = math.isfinite(full) and math.isfinite(half) and stable(full, half, threshold)
    if positive:
        ok = ok and full > 0
    return ok


# --------------------------------------------------------------------------
# Local log-Hoelder
# --------------------------------------------------------------------------

def _lh0_ratio(spec, x, y):
    dist = np.linalg.norm(x - y, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.abs(spec(x) - spec(y)) * -np.log(dist)
    return np.where(dist > 0, out, 0.0)


def _lh0_sup(spec: ExponentSpec, x, y, depth: int, top: int = 8):
    ratio = _lh0_ratio(spec, x, y)
    best = float(ratio.max())
    wit = [(x[int(np.argmax(ratio))].tolist(), y[int(np.argmax(ratio))].tolist(), best)]
    order = np.argsort(-np.abs(spec(x) - spec(y)))[:top]
    # zoom: keep the half-segment carrying the larger increment
    a, b = x[order].copy(), y[order].copy()
    for _ in range(depth):
        m = 0.5 * (a + b)
        left = np.abs(spec(a) - spec(m)) >= np.abs(spec(m) - spec(b))
        b = np.where(left[:, None], m, b)
        a = np.where(left[:, None], a, m)
        r = _lh0_ratio(spec, a, b)
        k = int(np.argmax(r))
        if r[k] > best:
            best = float(r[k])
            wit = [(a[k].tolist(), b[k].tolist(), best)]
    # polish the best sampled pairs, no finer than the zoom resolution
    d = x.shape[1]
    floor = 0.5 * 2.0 ** -depth
    for k in np.argsort(-ratio)[:3]:
        def obj(z):
            p, q = z[:d], z[d:]
            dist = np.linalg.norm(p - q)
            if not floor <= dist < 0.5:
                return 0.0
            return -float(_lh0_ratio(spec, p[None], q[None])[0])

        res = minimize(obj, np.concatenate([x[k], y[k]]), method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 400 * d})
        if -res.fun > best:
            best = float(-res.fun)
            wit = [(res.x[:d].tolist(), res.x[d:].tolist(), best)]
    return best, wit


def check_LH0(spec: ExponentSpec, pair_sampler: PairSampler | None = None, n_pairs: int = 4000,
              depth: int = 40) -> ConditionReport:
    """sup |p(x) - p(y)| (-log |x - y|) over pairs with 0 < |x - y| < 1/2."""
    if n_pairs <= 0:
        raise ValueError("n_pairs must be positive")
    ps = PairSampler() if pair_sampler is None else pair_sampler
    d = spec.dim
    full, wit = _lh0_sup(spec, *ps.sample(n_pairs, d), depth)
    half, _ = _lh0_sup(spec, *ps.sample(max(1, n_pairs // 2), d, half=True), depth // 2)
    return ConditionReport("LH0", full, half, _verdict(full, half), witnesses=wit,
                           notes={"n_pairs": n_pairs, "depth": depth, "seed": ps.seed})


# --------------------------------------------------------------------------
# Decay conditions at infinity
# --------------------------------------------------------------------------

def _ladder(d: int, r_max: float, n_rad: int = 200, n_dir: int = 32):
    radii = np.concatenate([np.linspace(1e-2, 1.0, n_rad // 4, endpoint=False),
                            np.logspace(0.0, math.log10(r_max), n_rad)])
    if d <= 3:
        dirs = np.asarray(sphere_rule(d, n_dir)[0])
    else:
        rng = np.random.default_rng(0)
        dirs = rng.standard_normal((n_dir, d))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    pts = radii[:, None, None] * dirs[None, :, :]
    return radii, pts


def fitted_p_inf(spec: ExponentSpec, r_far: float = 1e4) -> float:
    if spec.p_inf is not None:
        return spec.p_inf
    _, pts = _ladder(spec.dim, r_far)
    return float(np.median(spec(pts[-1])))


def _pinf_sup(spec, p_inf, r_max, n_rad):
    radii, pts = _ladder(spec.dim, r_max, n_rad)
    vals = np.abs(spec(pts) - p_inf) * (radii**2)[:, None]
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    return float(vals[i, j]), [(pts[i, j].tolist(), float(vals[i, j]))]


def check_Pinf_gamma(spec: ExponentSpec, r_max: float = 1e4, n_rad: int = 200) -> ConditionReport:
    """sup |p(x) - p_inf| |x|^2 over a radial/directional ladder."""
    p_inf = fitted_p_inf(spec, r_max)
    full, wit = _pinf_sup(spec, p_inf, r_max, n_rad)
    half, _ = _pinf_sup(spec, p_inf, math.sqrt(r_max), n_rad // 2)
    return ConditionReport("Pinf_gamma", full, half, _verdict(full, half), witnesses=wit,
                           notes={"p_inf": p_inf, "fitted_p_inf": spec.p_inf is None, "r_max": r_max})


def _infdecay_sup(spec, r_max, n_rad):
    radii, pts = _ladder(spec.dim, r_max, n_rad)
    lo, hi = spec.exterior_range(radii)
    p = spec(pts)
    gap = np.maximum(p - lo[:, None], hi[:, None] - p) * (radii**2)[:, None]
    i, j = np.unravel_index(int(np.argmax(gap)), gap.shape)
    return float(gap[i, j]), [(pts[i, j].tolist(), float(gap[i, j]))]


def check_infdecay(spec: ExponentSpec, r_max: float = 1e4, n_rad: int = 200) -> ConditionReport:
    """sup |p(x) - p(y)| |x|^2 over |y| >= |x| (exact in y)."""
    full, wit = _infdecay_sup(spec, r_max, n_rad)
    half, _ = _infdecay_sup(spec, math.sqrt(r_max), n_rad // 2)
    return ConditionReport("infdecay", full, half, _verdict(full, half), witnesses=wit,
                           notes={"r_max": r_max})


# --------------------------------------------------------------------------
# Ball conditions
# --------------------------------------------------------------------------

def _polish_balls(score: Callable, centers, radii, vals, far, r_min, r_max, sign: float, top: int = 3):
    """Local search of ``sign * score`` from the best sampled balls, inside the sampler bounds."""
    d = centers.shape[1]
    best_val, best_ball = None, None
    order = np.argsort(sign * vals)[:top] if sign > 0 else np.argsort(-vals)[:top]
    for k in order:
        def obj(z):
            c, lr = z[:d], z[d]
            r = math.exp(lr)
            if np.linalg.norm(c) > far or not r_min <= r <= r_max:
                return math.inf
            v = score(c[None, :], np.array([r]))[0]
            return sign * v if np.isfinite(v) else math.inf

        z0 = np.concatenate([centers[k], [math.log(radii[k])]])
        res = minimize(obj, z0, method="Nelder-Mead",
                       options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 300 * (d + 1)})
        v = sign * res.fun
        if np.isfinite(v) and (best_val is None or sign * v < sign * best_val):
            best_val, best_ball = float(v), (res.x[:d].tolist(), float(math.exp(res.x[d])))
    return best_val, best_ball


def _ball_extreme(score, sampler: BallSampler, n: int, d: int, half: bool, sign: float, skip_origin=False):
    far, r_min, r_max = sampler.bounds(half)
    c, r = sampler.sample(n, d, half)
    skipped = 0
    if skip_origin:
        keep = np.linalg.norm(c, axis=1) > r
        skipped = int((~keep).sum())
        c, r = c[keep], r[keep]
    vals = score(c, r)
    k = int(np.argmin(vals)) if sign > 0 else int(np.argmax(vals))
    best = float(vals[k])
    wit = [(c[k].tolist(), float(r[k]), best)]
    pv, pb = _polish_balls(score, c, r, vals, far, r_min, r_max, sign)
    if pv is not None and sign * pv < sign * best:
        best = pv
        wit = [(pb[0], pb[1], pv)]
    return best, wit, skipped


def log_measure_batch(measure: MeasureHandle | str, c, r):
    """log mu(B) for arrays of centres and radii."""
    kind = measure if isinstance(measure, str) else measure.kind
    if kind == "gaussian":
        return log_gaussian_ball_batch(c, r)
    if kind == "lebesgue":
        return np.log(lebesgue_ball_volume(c.shape[1], r))
    if kind == "grid_weighted":
        pts, w = np.asarray(measure.points), np.asarray(measure.weights)
        out = np.empty(len(r))
        for k in range(len(r)):
            inside = np.linalg.norm(pts - c[k], axis=1) < r[k]
            out[k] = math.log(w[inside].sum()) if np.any(inside) else -math.inf
        return out
    raise ValueError(f"unknown measure {kind!r}")


def _mu_power_score(spec, measure):
    def score(c, r):
        lo, hi = spec.ball_range(c, r)
        with np.errstate(invalid="ignore"):
            lv = (hi - lo) * log_measure_batch(measure, c, r)
        return np.exp(np.where(hi == lo, 0.0, lv))

    return score


def check_P_mu(spec: ExponentSpec, measure: MeasureHandle | str = "gaussian", ball_sampler: BallSampler | None = None,
               n_balls: int = 1000, condition: str = "P_mu") -> ConditionReport:
    """inf over sampled balls of mu(B)^{p^+_B - p^-_B}; passes when positive and sample-stable."""
    bs = BallSampler() if ball_sampler is None else ball_sampler
    score = _mu_power_score(spec, measure)
    full, wit, _ = _ball_extreme(score, bs, n_balls, spec.dim, False, +1.0)
    half, _, _ = _ball_extreme(score, bs, max(1, n_balls // 2), spec.dim, True, +1.0)
    kind = measure if isinstance(measure, str) else measure.kind
    return ConditionReport(condition, full, half, _verdict(full, half, positive=True), witnesses=wit,
                           notes={"measure": kind, "n_balls": n_balls, "seed": bs.seed})


def check_diening_lebesgue(spec: ExponentSpec, ball_sampler: BallSampler | None = None,
                           n_balls: int = 1000) -> ConditionReport:
    """inf over sampled balls of |B|^{p^+_B - p^-_B}."""
    return check_P_mu(spec, "lebesgue", ball_sampler, n_balls, condition="diening_lebesgue")


def check_maxdifp(spec: ExponentSpec, ball_sampler: BallSampler | None = None, n_balls: int = 2000) -> ConditionReport:
    """sup of (p^+_B - p^-_B) |q_B|^2 over sampled balls not containing the origin."""
    bs = BallSampler() if ball_sampler is None else ball_sampler

    def score(c, r):
        lo, hi = spec.ball_range(c, r)
        q = np.linalg.norm(c, axis=1) - r
        return np.where(q > 0, (hi - lo) * q**2, -math.inf)

    full, wit, skipped = _ball_extreme(score, bs, n_balls, spec.dim, False, -1.0, skip_origin=True)
    half, _, _ = _ball_extreme(score, bs, max(1, n_balls // 2), spec.dim, True, -1.0, skip_origin=True)
    return ConditionReport("maxdifp", full, half, _verdict(full, half), witnesses=wit, skipped=skipped,
                           notes={"n_balls": n_balls, "seed": bs.seed})


def equivalence_probe(spec: ExponentSpec, ball_sampler: BallSampler | None = None) -> dict:
    """maxdifp, P^inf_gamma and the decay condition, with a consistency verdict."""
    reps = [check_maxdifp(spec, ball_sampler), check_Pinf_gamma(spec), check_infdecay(spec)]
    verdicts = {r.verdict for r in reps}
    return {"reports": reps, "consistent": len(verdicts) == 1, "all_pass": verdicts == {True}}


# --------------------------------------------------------------------------
# Integrability of the exponent gap
# --------------------------------------------------------------------------

def s_exponent(spec: ExponentSpec, x, p_inf: float) -> np.ndarray:
    """s(x) with 1/s = |1/p(x) - 1/p_inf| (inf where p(x) = p_inf)."""
    inv = np.abs(1.0 / spec(x) - 1.0 / p_inf)
    with np.errstate(divide="ignore"):
        return np.where(inv > 0, 1.0 / np.where(inv > 0, inv, 1.0), np.inf)


def _nekvinda_integral(spec, measure_kind, lam, p_inf, R, n_dir=64):
    d = spec.dim
    edges = np.concatenate([[0.0], np.logspace(-3, math.log10(R), int(40 * math.log10(R * 1e3)) + 1)])
    rho, w = composite_gauss_legendre(edges, 16)
    dirs, dw = sphere_rule(d, n_dir) if d <= 3 else (None, None)
    pts = rho[:, None, None] * np.asarray(dirs)[None, :, :]
    s = s_exponent(spec, pts, p_inf)
    with np.errstate(over="ignore"):
        val = np.where(np.isinf(s), 0.0, lam ** (-np.where(np.isinf(s), 1.0, s)))
    if measure_kind == "gaussian":
        dens = np.exp(-rho**2) / math.pi ** (d / 2)
    else:
        dens = np.ones_like(rho)
    radial = np.sum(val * np.asarray(dw)[None, :], axis=1) * rho ** (d - 1) * dens
    return float(np.sum(radial * w))


def nekvinda_check(spec: ExponentSpec, measure: MeasureHandle | str = "gaussian",
                   lambda_grid=(1.5, 2.0, 4.0, 8.0, 16.0, 64.0), R: float = 1e5, rtol: float = 1e-3) -> ConditionReport:
    """Finiteness of int lambda^{-s(y)} d mu(y) for some lambda > 1 in the grid.

    Finiteness is judged by stabilisation of the truncated integrals over
    |y| <= R/4, R/2, R.  Convention: lambda^{-inf} = 0.
    """
    kind = measure if isinstance(measure, str) else measure.kind
    p_inf = fitted_p_inf(spec)
    rows = []
    ok_lambda = None
    for lam in lambda_grid:
        vals = [_nekvinda_integral(spec, kind, lam, p_inf, R / f) for f in (4, 2, 1)]
        settled = relative_change(vals[1], vals[2]) <= rtol and relative_change(vals[0], vals[1]) <= 2 * rtol
        if vals[2] == 0.0:
            settled = True
        rows.append((lam, vals[2], settled))
        if settled and ok_lambda is None:
            ok_lambda = lam
    full = rows[-1][1] if ok_lambda is None else next(v for l, v, _ in rows if l == ok_lambda)
    return ConditionReport("nekvinda", full, full, ok_lambda is not None,
                           witnesses=[(l, v, s) for l, v, s in rows],
                           notes={"lambda": ok_lambda, "measure": kind, "p_inf": p_inf, "R": R})
