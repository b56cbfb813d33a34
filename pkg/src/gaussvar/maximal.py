"""Non-centred maximal operator over countable ball families and the
inequality chain behind its boundedness on L^{p(.)}(gamma_d).

Ball averages use the grid function's own quadrature weights, so the grid
measure of a ball is the sum of the weights of the grid points inside it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy import sparse
from scipy.spatial import cKDTree

from .exponents import (BallSampler, ExponentSpec, check_LH0, check_P_mu, check_Pinf_gamma, fitted_p_inf,
                        log_measure_batch, s_exponent, scaled_exponent)
from .gauss_measure import GAUSSIAN, BallFamily, MeasureHandle, dyadic_ball_family
from .grids import GridFunction
from .norms import EPS_NUM, luxemburg_norm
from .reports import CheckReport, format_table, relative_change


class UncoveredPointError(ValueError):
    """An evaluation point lies in no ball of the family with positive grid mass."""


class PrerequisiteError(RuntimeError):
    """The exponent does not satisfy the hypotheses of a boundedness experiment."""


@dataclass(frozen=True)
class MaximalInstance:
    """Measure, ball family, exponent and the constants of the inequality chain.

    ``c_mu`` is the fitted infimum of mu(B)^{p^+_B - p^-_B}; when ``delta`` is
    not given it defaults to min(c_mu, gamma) / 6.
    """

    measure: MeasureHandle
    family: BallFamily
    spec: ExponentSpec
    gamma: float = 0.5
    delta: float | None = None
    p_inf: float | None = None
    c_mu: float | None = None

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if self.p_inf is None:
            object.__setattr__(self, "p_inf", fitted_p_inf(self.spec))
        if self.delta is None and self.c_mu is not None:
            object.__setattr__(self, "delta", min(self.c_mu, self.gamma) / 6.0)
        if self.delta is not None and not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")

    def to_record(self) -> dict:
        return {"measure": self.measure.kind, "dim": self.measure.dim, "family_size": len(self.family),
                "spec": self.spec.to_record(), "gamma": self.gamma, "delta": self.delta,
                "p_inf": self.p_inf, "c_mu": self.c_mu}


def certify(spec: ExponentSpec, measure: MeasureHandle | str = "gaussian", n_balls: int = 1000,
            seed: int = 0) -> dict:
    """LH0, P^inf_gamma and P_mu reports; ``c_mu`` is the fitted P_mu constant."""
    lh0 = check_LH0(spec)
    pinf = check_Pinf_gamma(spec)
    pmu = check_P_mu(spec, measure, BallSampler(seed=seed), n_balls)
    return {"LH0": lh0, "Pinf_gamma": pinf, "P_mu": pmu, "c_mu": pmu.fitted_constant,
            "certified": lh0.verdict and pinf.verdict and pmu.verdict}


def make_instance(spec: ExponentSpec, d: int | None = None, box: tuple[float, float] = (-10.0, 10.0),
                  levels: int | None = None, gamma: float = 0.5, c_mu: float | None = None,
                  family: BallFamily | None = None) -> MaximalInstance:
    """Instance on the Gaussian measure with a dyadic family over ``box^d``."""
    d = spec.dim if d is None else d
    if levels is None:
        levels = 8 if d == 1 else 5
    fam = dyadic_ball_family(box, levels, d) if family is None else family
    if c_mu is None:
        c_mu = certify(replace(spec, dim=d))["c_mu"]
    return MaximalInstance(GAUSSIAN[d], fam, spec, gamma=gamma, c_mu=c_mu)


def q_instance(inst: MaximalInstance) -> MaximalInstance:
    """The instance for q = p / p^-: constants c_mu^{1/p^-}, p_inf / p^-."""
    pm = inst.spec.p_minus
    c = None if inst.c_mu is None else inst.c_mu ** (1.0 / pm)
    return MaximalInstance(inst.measure, inst.family, scaled_exponent(inst.spec, pm), inst.gamma,
                           None if c is None else min(c, inst.gamma) / 6.0, inst.p_inf / pm, c)


# --------------------------------------------------------------------------
# Maximal operator
# --------------------------------------------------------------------------

def membership(family: BallFamily, points: np.ndarray) -> sparse.csr_matrix:
    """Boolean (balls x points) incidence, closed balls."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    tree = cKDTree(points)
    hits = tree.query_ball_point(family.centers, family.radii)
    indptr = np.zeros(len(family) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(h) for h in hits])
    indices = np.concatenate([np.sort(np.asarray(h, dtype=np.int64)) for h in hits]) if len(hits) else np.zeros(0, np.int64)
    data = np.ones(indices.size)
    return sparse.csr_matrix((data, indices, indptr), shape=(len(family), points.shape[0]))


class MaximalOperator:
    """M_mu on a fixed grid, with precomputed ball incidences.

    ``eval_points`` defaults to the grid points themselves.
    """

    def __init__(self, family: BallFamily, grid_points: np.ndarray, weights: np.ndarray,
                 eval_points: np.ndarray | None = None):
        self.family = family
        self.weights = np.asarray(weights, dtype=float)
        self.A = membership(family, grid_points)
        self.mass = self.A @ self.weights
        valid = self.mass > 0
        self.valid = valid
        B = self.A if eval_points is None else membership(family, eval_points)
        self.B = B[valid].tocsc()
        covered = np.diff(self.B.indptr) > 0
        if not np.all(covered):
            bad = np.flatnonzero(~covered)[:5]
            raise UncoveredPointError(f"{(~covered).sum()} evaluation points are not covered (first indices {bad.tolist()})")

    @classmethod
    def for_grid(cls, family: BallFamily, f: GridFunction, eval_points=None) -> "MaximalOperator":
        return cls(family, f.points, f.weights, eval_points)

    def averages(self, values) -> np.ndarray:
        num = self.A @ (self.weights * np.abs(np.asarray(values, dtype=float)))
        return num[self.valid] / self.mass[self.valid]

    def __call__(self, values) -> np.ndarray:
        avg = self.averages(values)
        M = self.B.multiply(avg[:, None]).tocsc()
        return np.asarray(M.max(axis=0).todense()).reshape(-1)


def maximal_apply(inst: MaximalInstance, f: GridFunction, x=None) -> np.ndarray:
    """M_mu f at ``x`` (default: the grid points of f)."""
    pts = None if x is None else np.atleast_2d(np.asarray(x, dtype=float))
    return MaximalOperator.for_grid(inst.family, f, pts)(f.values)


def maximal_scan(inst: MaximalInstance, f: GridFunction, x) -> np.ndarray:
    """Exhaustive loop over the family; the reference for :func:`maximal_apply`."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    out = np.full(x.shape[0], -np.inf)
    absf = np.abs(f.values)
    for k in range(len(inst.family)):
        c, r = inst.family.centers[k], inst.family.radii[k]
        inside = np.linalg.norm(f.points - c, axis=1) <= r
        m = f.weights[inside].sum()
        if m <= 0:
            continue
        avg = float(np.sum(f.weights[inside] * absf[inside]) / m)
        hit = np.linalg.norm(x - c, axis=1) <= r
        out[hit] = np.maximum(out[hit], avg)
    if np.any(np.isinf(out)):
        raise UncoveredPointError("evaluation point not covered by the family")
    return out


# --------------------------------------------------------------------------
# Exponents of the chain
# --------------------------------------------------------------------------

def _inverse_to_exponent(inv) -> np.ndarray:
    inv = np.asarray(inv, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(inv > 0, 1.0 / np.where(inv > 0, inv, 1.0), np.inf)


def exponents_q_s(spec: ExponentSpec, p_inf: float, x, y) -> tuple[np.ndarray, np.ndarray]:
    """q(x, y) with 1/q = max(1/p(x) - 1/p(y), 0) and s(x) with 1/s = |1/p(x) - 1/p_inf|."""
    px, py = spec(x), spec(y)
    q = _inverse_to_exponent(np.maximum(1.0 / px - 1.0 / py, 0.0))
    return q, s_exponent(spec, x, p_inf)


def power_inf(t, q) -> np.ndarray:
    """t^q for t in [0, 1], q in [1, inf], with t^inf = 0 for t < 1."""
    t = np.asarray(t, dtype=float)
    q = np.asarray(q, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = np.where(np.isinf(q), np.where(t >= 1.0, 1.0, 0.0), t ** np.where(np.isinf(q), 1.0, q))
    return out


# --------------------------------------------------------------------------
# Sampled configurations
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConfigSampler:
    """Balls with log-uniform radii and centres in [-box, box]^d, plus a point of each ball."""

    box: float = 6.0
    r_range: tuple = (0.25, 4.0)
    seed: int = 0

    def sample(self, n: int, d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        rng = np.random.default_rng([self.seed, 11, d])
        c = rng.uniform(-self.box, self.box, (n, d))
        r = np.exp(rng.uniform(math.log(self.r_range[0]), math.log(self.r_range[1]), n))
        u = rng.standard_normal((n, d))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        x = c + u * (r * rng.uniform(0.0, 1.0, n) ** (1.0 / d))[:, None]
        return c, r, x


def _report(name: str, ratios: np.ndarray, eps: float, details: dict) -> CheckReport:
    ratios = np.asarray(ratios, dtype=float)
    n = ratios.size
    viol = int(np.sum(ratios > 1.0 + eps))
    full = float(np.max(ratios)) if n else 0.0
    half = float(np.max(ratios[: max(1, n // 2)])) if n else 0.0
    details = dict(details, n=n)
    return CheckReport(name, details.get("sample", ""), full, relative_change(full, half), viol == 0, viol, details)


def lemma_A1_check(inst: MaximalInstance, lam_grid: Sequence[float], centers, radii, xs,
                   eps: float = EPS_NUM) -> CheckReport:
    """(c_mu (lam/mu(B))^{1/p^-_B})^{p(x)} <= lam/mu(B) for x in B, lam in [0, 1].

    ``fitted_constant`` is the largest observed LHS/RHS ratio.
    """
    if inst.c_mu is None:
        raise ValueError("instance needs c_mu")
    centers, radii, xs = np.atleast_2d(centers), np.asarray(radii, float), np.atleast_2d(xs)
    lam = np.asarray(lam_grid, dtype=float)
    if np.any((lam < 0) | (lam > 1)):
        raise ValueError("lambda must lie in [0, 1]")
    log_mu = log_measure_batch(inst.measure, centers, radii)
    p_lo, _ = inst.spec.ball_range(centers, radii)
    px = inst.spec(xs)
    pos = lam > 0
    log_t = np.log(lam[pos])[None, :] - log_mu[:, None]
    log_lhs = px[:, None] * (math.log(inst.c_mu) + log_t / p_lo[:, None])
    ratios = np.exp(log_lhs - log_t).reshape(-1)
    return _report("lemma_A1", ratios, eps, {"sample": f"{len(radii)}x{lam.size}", "zero_lambda": int((~pos).sum())})


def _check_half_norm(f: GridFunction, spec: ExponentSpec) -> float:
    n = luxemburg_norm(f, spec)
    if n > 0.5 * (1.0 + 1e-9):
        raise ValueError(f"f must satisfy ||f|| <= 1/2 (got {n:.6g}); use normalize_half")
    return n


def normalize_half(f: GridFunction, spec: ExponentSpec, eps: float = 1e-12) -> GridFunction:
    """f / (2 ||f|| + eps)."""
    return f.with_values(f.values / (2.0 * luxemburg_norm(f, spec) + eps))


def jensen_variable_check(inst: MaximalInstance, f: GridFunction, centers, radii, xs,
                          eps: float = EPS_NUM) -> CheckReport:
    """(delta avg_B|f|)^{p(x)} <= avg_B |f|^{p(y)} + avg_B gamma^{q(x,y)} at sampled (B, x)."""
    if inst.delta is None:
        raise ValueError("instance needs delta (or c_mu)")
    _check_half_norm(f, inst.spec)
    centers, radii, xs = np.atleast_2d(centers), np.asarray(radii, float), np.atleast_2d(xs)
    tree = cKDTree(f.points)
    hits = tree.query_ball_point(centers, radii)
    absf = np.abs(f.values)
    p_grid = inst.spec(f.points)
    fp = absf ** p_grid
    px = inst.spec(xs)
    lg = math.log(inst.gamma)
    ratios, empty = [], 0
    for k, idx in enumerate(hits):
        if not idx:
            empty += 1
            continue
        idx = np.asarray(idx)
        w = f.weights[idx]
        m = w.sum()
        if m <= 0:
            empty += 1
            continue
        avg = float(np.sum(w * absf[idx]) / m)
        lhs = (inst.delta * avg) ** px[k]
        inv_q = np.maximum(1.0 / px[k] - 1.0 / p_grid[idx], 0.0)
        gq = np.exp(lg / np.where(inv_q > 0, inv_q, 1.0)) * (inv_q > 0)
        rhs = float(np.sum(w * fp[idx]) / m + np.sum(w * gq) / m)
        ratios.append(0.0 if lhs == 0 else (lhs / rhs if rhs > 0 else math.inf))
    return _report("jensen_variable", np.array(ratios), eps, {"sample": f"{len(radii)}", "empty_balls": empty,
                                                               "delta": inst.delta})


def lemma_A4_check(spec: ExponentSpec, p_inf: float, t_grid, xs, ys, eps: float = EPS_NUM) -> CheckReport:
    """t^{q(x,y)} <= t^{s(x)/2} + t^{s(y)/2} for t in [0, 1]."""
    t = np.asarray(t_grid, dtype=float)
    if np.any((t < 0) | (t > 1)):
        raise ValueError("t must lie in [0, 1]")
    q, sx = exponents_q_s(spec, p_inf, xs, ys)
    sy = s_exponent(spec, ys, p_inf)
    lhs = power_inf(t[None, :], q[:, None])
    rhs = power_inf(t[None, :], sx[:, None] / 2) + power_inf(t[None, :], sy[:, None] / 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(lhs == 0, 0.0, lhs / rhs)
    return _report("lemma_A4", ratios.reshape(-1), eps, {"sample": f"{len(q)}x{t.size}"})


def pointwise_maximal_check(inst: MaximalInstance, f: GridFunction, sample_x=None,
                            eps: float = EPS_NUM) -> CheckReport:
    """(delta M f(x))^{p(x)} <= M(|f|^{p(.)})(x) + 2 M(gamma^{s(.)/2})(x)."""
    if inst.delta is None:
        raise ValueError("instance needs delta (or c_mu)")
    _check_half_norm(f, inst.spec)
    xs = f.points if sample_x is None else np.atleast_2d(sample_x)
    op = MaximalOperator.for_grid(inst.family, f, None if sample_x is None else xs)
    absf = np.abs(f.values)
    p_grid = inst.spec(f.points)
    s_grid = s_exponent(inst.spec, f.points, inst.p_inf)
    Mf = op(absf)
    Mfp = op(absf ** p_grid)
    Mg = op(power_inf(inst.gamma, s_grid / 2))
    lhs = (inst.delta * Mf) ** inst.spec(xs)
    rhs = Mfp + 2.0 * Mg
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(lhs == 0, 0.0, lhs / rhs)
    return _report("pointwise_maximal", ratios, eps, {"sample": f"{xs.shape[0]}", "delta": inst.delta})


# --------------------------------------------------------------------------
# Boundedness experiment
# --------------------------------------------------------------------------

def bump_family(d: int, centers: Sequence[float] = (0.0, 2.0, 5.0, 8.0),
                widths: Sequence[float] = (0.25, 1.0)) -> list[tuple[str, Callable]]:
    """Constant function plus Gaussian bumps centred at |c| e_1."""
    out: list[tuple[str, Callable]] = [("one", lambda x: np.ones(np.asarray(x).shape[0]))]
    for c in centers:
        for w in widths:
            cc = np.zeros(d)
            cc[0] = c

            def f(x, cc=cc, w=w):
                return np.exp(-np.sum((np.asarray(x) - cc) ** 2, axis=-1) / w**2)

            out.append((f"bump_c{c:g}_w{w:g}", f))
    return out


@dataclass
class BoundednessResult:
    rows: list = field(default_factory=list)
    n_grid: int = 0

    COLUMNS = ("function", "norm_f", "norm_Mf", "ratio")

    @property
    def K(self) -> float:
        return max(r[3] for r in self.rows) if self.rows else math.nan

    def table(self) -> str:
        return format_table(self.rows, self.COLUMNS)


def default_grid_size(d: int) -> int:
    return {1: 1024, 2: 128}.get(d, 32)


def boundedness_experiment(inst: MaximalInstance, functions: Sequence[tuple[str, Callable]] | None = None,
                           n: int | None = None, box: tuple[float, float] = (-10.0, 10.0),
                           require: bool = True) -> BoundednessResult:
    """||M f|| / ||f|| in L^{p(.)}(gamma_d) for each test function; K is the largest ratio."""
    d = inst.family.dim
    if require and inst.spec.p_minus <= 1.0:
        raise PrerequisiteError("boundedness experiment needs p^- > 1")
    fns = bump_family(d) if functions is None else list(functions)
    n = default_grid_size(d) if n is None else n
    grid = GridFunction.on_box(0.0, box, n, d, "gaussian")
    op = MaximalOperator.for_grid(inst.family, grid)
    spec = replace(inst.spec, dim=d) if inst.spec.dim != d else inst.spec
    res = BoundednessResult(n_grid=n)
    for name, fn in fns:
        f = grid.with_values(fn(grid.points))
        nf = luxemburg_norm(f, spec)
        nM = luxemburg_norm(f.with_values(op(f.values)), spec)
        res.rows.append([name, nf, nM, nM / nf if nf > 0 else math.nan])
    return res
