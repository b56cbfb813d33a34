"""Kernels of the Gaussian Riesz transforms and their principal-value application.

With r = e^{-s} and t = 1 - r^2 the kernels are one-dimensional integrals
over t in (0, 1).  For a family with profile F and order m (F = C H_a for
the Riesz transforms, m = |a|):

    new:  K(x, y) = 1/2 int phi_m(t) F((x - sqrt(1-t) y)/sqrt t) e^{-u(t)} t^{-d/2-1} dt
    old:  K(x, y) = 1/2 int psi_m(t) (1-t)^{(m-2)/2} F((y - sqrt(1-t) x)/sqrt t) e^{-u(t)} t^{-d/2-1} dt

where u(t) = |y - sqrt(1-t) x|^2 / t.  In the new kernel the weight
e^{|x|^2 - |y|^2} e^{-|x - sqrt(1-t) y|^2/t} has been folded into e^{-u(t)}.

The t-integral is computed in the logit variable v = log(t/(1-t)) on a
window where u(t) <= u_0 + W, with composite Gauss-Legendre panels.  The
window follows the minimum of u, so peaked integrands far from the origin
get the same resolution as the near-diagonal ones.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import expit

from .gauss_measure import hyperbolic_radius
from .hermite import hermite_multi, hermite_multi_grad
from .quadrature import composite_gauss_legendre, gauss_legendre, half_line_rule, sphere_rule


class KernelConvergenceError(RuntimeError):
    """Panel refinement changed a kernel value by more than the tolerance."""


class PVConvergenceError(RuntimeError):
    """The exclusion-radius sequence of a principal value is not Cauchy."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Parameters of the kernel and principal-value quadratures.

    ``pv_radii`` are exclusion radii relative to the hyperbolic radius of x
    and must decrease strictly; the last two drive the extrapolation.
    """

    t_panels: int = 32
    gl_order: int = 16
    endpoint_map: str = "logit"
    u_window: float = 70.0
    v_max: float = 60.0
    pv_radii: tuple = tuple(0.05 * 2.0 ** -k for k in range(7))
    radial_log_width: float = 0.25
    angular_points: int = 64
    domain_truncation_radius: float | None = None
    tol: float = 1e-6
    pv_tol: float = 1e-3
    separation_floor: float = 1e-10
    max_batch_nodes: int = 4_000_000

    def __post_init__(self):
        r = np.asarray(self.pv_radii, dtype=float)
        if r.size < 2 or np.any(r <= 0) or np.any(np.diff(r) >= 0):
            raise ValueError("pv_radii must be positive and strictly decreasing")
        if self.tol <= 0 or self.pv_tol <= 0:
            raise ValueError("tolerances must be > 0")
        if self.endpoint_map not in ("logit", "double_exponential"):
            raise ValueError(f"unknown endpoint_map {self.endpoint_map!r}")

    def refined(self, factor: int = 2) -> "QuadratureConfig":
        from dataclasses import replace

        return replace(self, t_panels=self.t_panels * factor, angular_points=self.angular_points * factor,
                       radial_log_width=self.radial_log_width / factor)

    def truncation_radius(self, x) -> float:
        if self.domain_truncation_radius is not None:
            return float(self.domain_truncation_radius)
        return max(8.0, float(np.linalg.norm(x)) + 6.0)


def analytic_constant(m: int, d: int) -> float:
    """C with R = p.v. int C K_{H_a} for raw Hermite H_a of order m = |a|."""
    return 2.0 ** (-m / 2) * math.pi ** (-d / 2) / math.gamma(m / 2)


@dataclass(frozen=True)
class KernelFamily:
    """Kernel profile F with order m and growth parameter eps.

    ``F`` and ``grad`` act on arrays of shape (..., d).
    """

    dim: int
    m: float
    F: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray] | None = None
    eps: float = 0.05
    alpha: tuple | None = None
    scale: float = 1.0
    name: str = "custom"
    orthogonal: bool = True

    @classmethod
    def hermite(cls, alpha, scale: float | None = None, eps: float = 0.05) -> "KernelFamily":
        alpha = tuple(int(a) for a in alpha)
        m = sum(alpha)
        if m < 1:
            raise ValueError("need |alpha| >= 1")
        d = len(alpha)
        c = analytic_constant(m, d) if scale is None else float(scale)
        return cls(
            dim=d, m=m,
            F=lambda z: c * hermite_multi(alpha, z),
            grad=lambda z: c * hermite_multi_grad(alpha, z),
            eps=eps, alpha=alpha, scale=c, name=f"H{''.join(map(str, alpha))}",
        )

    def with_scale(self, c: float) -> "KernelFamily":
        if self.alpha is None:
            raise ValueError("rescaling is defined for Hermite families")
        return KernelFamily.hermite(self.alpha, c, self.eps)

    def growth_constants(self, radii=(0.5, 1, 2, 4, 8, 16), n_dir: int = 64) -> dict:
        """Sup of |F| e^{-eps |x|^2} and |grad F| e^{-eps |x|^2} on a sphere ladder."""
        w, _ = sphere_rule(self.dim, n_dir)
        rs = np.asarray(radii, dtype=float)
        pts = rs[:, None, None] * w[None, :, :]
        damp = np.exp(-self.eps * rs**2)[:, None]
        cF = float(np.max(np.abs(self.F(pts)) * damp))
        cG = float("nan")
        if self.grad is not None:
            cG = float(np.max(np.linalg.norm(self.grad(pts), axis=-1) * damp))
        return {"C_F": cF, "C_grad": cG}

    def gaussian_mean(self, n: int = 40) -> float:
        """int F d gamma_d by tensor Gauss-Hermite."""
        from .hermite import _tensor_gauss

        pts, wts = _tensor_gauss(self.dim, n)
        return float(np.sum(wts * self.F(pts)))


# --------------------------------------------------------------------------
# Scalar ingredients
# --------------------------------------------------------------------------

def _log_ratio_neglog1m(v):
    # log((-log(1-t))/t) in terms of v = logit(t)
    v = np.asarray(v, dtype=float)
    t = expit(v)
    L = np.logaddexp(0.0, v)
    small = v < -30
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log(L / t)
    return np.where(small, t / 2, out)


def psi_phi(m: float, t) -> tuple[np.ndarray, np.ndarray]:
    """psi_m(t) = ((-log(1-t))/t)^{(m-2)/2} 2^{-(m-2)/2} and phi_m = psi_m/sqrt(1-t)."""
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t >= 1)):
        raise ValueError("t must lie in [0, 1)")
    with np.errstate(divide="ignore"):
        v = np.log(t) - np.log1p(-t)
    lr = np.where(t > 0, _log_ratio_neglog1m(v), 0.0)
    psi = np.exp((m - 2) / 2 * (lr - math.log(2.0)))
    phi = psi / np.sqrt(1.0 - t)
    return psi, phi


@dataclass(frozen=True)
class Geometry:
    x: np.ndarray
    y: np.ndarray
    a: float
    b: float
    t0: float
    u0: float

    def u(self, t):
        t = np.asarray(t, dtype=float)
        r = np.sqrt(1.0 - t)[..., None]
        return np.sum((self.y - r * self.x) ** 2, axis=-1) / t

    def ubar(self, t):
        return self.u(t) + self.x @ self.x - self.y @ self.y


def _t0_u0(X, Y):
    nx2 = np.sum(X * X, axis=-1)
    ny2 = np.sum(Y * Y, axis=-1)
    a = nx2 + ny2
    b = 2.0 * np.sum(X * Y, axis=-1)
    root = np.linalg.norm(X + Y, axis=-1) * np.linalg.norm(X - Y, axis=-1)
    pos = b > 0
    with np.errstate(invalid="ignore", divide="ignore"):
        t0 = np.where(pos, 2.0 * root / (a + root), 1.0)
    u0 = np.where(pos, 0.5 * (ny2 - nx2 + root), ny2)
    return a, b, t0, u0


def geometry(x, y) -> Geometry:
    """a, b, the minimiser t0 of u over (0, 1] and the minimum u0."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    a, b, t0, u0 = _t0_u0(x, y)
    if a == 0:
        raise ValueError("x = y = 0 is degenerate")
    return Geometry(x, y, float(a), float(b), float(t0), float(u0))


# --------------------------------------------------------------------------
# Kernel quadrature
# --------------------------------------------------------------------------

def _u_of_v(X, Y, v):
    t = expit(v)
    r = np.sqrt(expit(-v))
    diff = Y - r[..., None] * X
    return np.sum(diff * diff, axis=-1) / t


def _window(X, Y, cfg: QuadratureConfig):
    """Per-pair logit interval on which u(t) <= u0 + W."""
    _, _, t0, u0 = _t0_u0(X, Y)
    thr = u0 + cfg.u_window
    with np.errstate(divide="ignore"):
        v0 = np.where(t0 < 1.0, np.log(t0) - np.log1p(-np.minimum(t0, 1 - 1e-16)), cfg.v_max)
    v0 = np.minimum(v0, cfg.v_max)
    # lower end: u decreasing on (0, t0]
    lo = np.full(t0.shape, -700.0)
    hi = v0.copy()
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        big = _u_of_v(X, Y, mid) > thr
        lo = np.where(big, mid, lo)
        hi = np.where(big, hi, mid)
    va = lo
    # upper end: u increasing on [t0, 1)
    ny2 = np.sum(Y * Y, axis=-1)
    open_top = (t0 >= 1.0) | (ny2 <= thr)
    lo = v0.copy()
    hi = np.full(t0.shape, cfg.v_max)
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        big = _u_of_v(X, Y, mid) > thr
        hi = np.where(big, mid, hi)
        lo = np.where(big, lo, mid)
    vb = np.where(open_top, cfg.v_max, hi)
    vb = np.maximum(vb, va + 1e-6)
    return va, vb, t0, u0


def _kernel_chunk(X, Y, fam: KernelFamily, cfg: QuadratureConfig, variant: str, with_abs: bool):
    d = X.shape[-1]
    va, vb, t0, u0 = _window(X, Y, cfg)
    if cfg.endpoint_map == "logit":
        edges = np.linspace(va, vb, cfg.t_panels + 1, axis=-1)
        v, w = composite_gauss_legendre(edges, cfg.gl_order)
    else:
        # log-t panels up to t = 1/2, tanh-sinh map of the remaining window
        from .quadrature import tanh_sinh

        vmid = np.minimum(vb, 0.0)
        edges = np.linspace(va, vmid, cfg.t_panels + 1, axis=-1)
        v1, w1 = composite_gauss_legendre(edges, cfg.gl_order)
        s, _, ws = tanh_sinh(0.0, 1.0, h=1.0 / 16)
        v2 = vmid[:, None] + (vb - vmid)[:, None] * s[None, :]
        w2 = (vb - vmid)[:, None] * ws[None, :]
        v = np.concatenate([v1, v2], axis=-1)
        w = np.concatenate([w1, w2], axis=-1)
    t = expit(v)
    c = expit(-v)
    r = np.sqrt(c)
    logt = -np.logaddexp(0.0, -v)
    logc = -np.logaddexp(0.0, v)
    diff_u = Y[:, None, :] - r[..., None] * X[:, None, :]
    u = np.sum(diff_u * diff_u, axis=-1) / t
    lpsi = (fam.m - 2) / 2 * (_log_ratio_neglog1m(v) - math.log(2.0))
    if variant == "new":
        z = (X[:, None, :] - r[..., None] * Y[:, None, :]) / np.sqrt(t)[..., None]
        lw = lpsi - 0.5 * logc
    elif variant == "old":
        z = diff_u / np.sqrt(t)[..., None]
        lw = lpsi + (fam.m - 2) / 2 * logc
    else:
        raise ValueError(f"unknown variant {variant!r}")
    # 1/2 * weight * t^{-d/2-1} * e^{-(u-u0)} * dt/dv, dt/dv = t(1-t)
    lg = lw - (u - u0[:, None]) - (d / 2) * logt + logc
    g = 0.5 * np.exp(lg) * w
    vals = fam.F(z)
    out = np.sum(g * vals, axis=-1)
    if with_abs:
        return out, u0, np.sum(g * np.abs(vals), axis=-1)
    return out, u0, None


def kernel_values(X, Y, fam: KernelFamily, cfg: QuadratureConfig | None = None, variant: str = "new",
                  log_scale: bool = False, with_abs: bool = False):
    """Vectorised kernel values for pairs (X[k], Y[k]).

    With ``log_scale=True`` returns ``(s, u0)`` such that K = s * e^{-u0};
    this keeps far-field values representable.
    """
    cfg = QuadratureConfig() if cfg is None else cfg
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    X, Y = np.broadcast_arrays(X, Y)
    P = X.shape[0]
    sep = np.linalg.norm(X - Y, axis=-1)
    if np.any(sep == 0):
        raise ValueError("kernels are singular on the diagonal x = y")
    if np.any(sep < cfg.separation_floor):
        warnings.warn("kernel evaluated closer to the diagonal than the separation floor", RuntimeWarning)
    nodes = cfg.t_panels * cfg.gl_order + 200
    step = max(1, cfg.max_batch_nodes // nodes)
    out = np.empty(P)
    u0 = np.empty(P)
    ab = np.empty(P) if with_abs else None
    for s in range(0, P, step):
        sl = slice(s, s + step)
        o, uu, a = _kernel_chunk(X[sl], Y[sl], fam, cfg, variant, with_abs)
        out[sl] = o
        u0[sl] = uu
        if with_abs:
            ab[sl] = a
    if log_scale:
        return (out, u0, ab) if with_abs else (out, u0)
    scale = np.exp(-u0)
    return (out * scale, ab * scale) if with_abs else out * scale


def _checked_kernel(x, y, fam, cfg, variant):
    cfg = QuadratureConfig() if cfg is None else cfg
    v1, u0, a1 = kernel_values(x, y, fam, cfg, variant, log_scale=True, with_abs=True)
    v2, _, a2 = kernel_values(x, y, fam, cfg.refined(), variant, log_scale=True, with_abs=True)
    if abs(v1[0] - v2[0]) > cfg.tol * (abs(v2[0]) + a2[0]) + 1e-300:
        raise KernelConvergenceError(f"kernel at {x}, {y}: {v1[0]:.3e} vs refined {v2[0]:.3e}")
    return float(v2[0] * math.exp(-u0[0]))


def kernel_new(x, y, fam: KernelFamily, cfg: QuadratureConfig | None = None) -> float:
    """K_F(x, y) of the new transform, checked against a panel-doubled evaluation."""
    return _checked_kernel(x, y, fam, cfg, "new")


def kernel_old(x, y, alpha, cfg: QuadratureConfig | None = None, scale: float | None = None) -> float:
    """K_a(x, y) of the old transform, checked against a panel-doubled evaluation."""
    return _checked_kernel(x, y, KernelFamily.hermite(alpha, scale), cfg, "old")


def kernel_rform(x, y, fam: KernelFamily, variant: str = "new", epsrel: float = 1e-10) -> float:
    """Independent evaluation of the kernel in the original variable r in (0, 1).

    new:  int (-log r)^{(m-2)/2} (1-r^2)^{-(m+d)/2} F((x-ry)/sqrt(1-r^2)) e^{-|y-rx|^2/(1-r^2)} dr
    old:  same with r^{m-1} and F((y-rx)/sqrt(1-r^2)).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    d, m = x.size, fam.m
    g = geometry(x, y)

    def f(r):
        s2 = 1.0 - r * r
        e = np.sum((y - r * x) ** 2) / s2 - g.u0
        if variant == "new":
            z = (x - r * y) / math.sqrt(s2)
            pre = 1.0
        else:
            z = (y - r * x) / math.sqrt(s2)
            pre = r ** (m - 1)
        return pre * (-math.log(r)) ** ((m - 2) / 2) * s2 ** (-(m + d) / 2) * float(fam.F(z[None, :])[0]) * math.exp(-e)

    r0 = math.sqrt(max(0.0, 1.0 - g.t0))
    pts = [p for p in (r0, 0.5, 0.9, 0.99) if 0 < p < 1]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(f, 0.0, 1.0, points=sorted(set(pts)), epsabs=0.0, epsrel=epsrel, limit=1000)
    return val * math.exp(-g.u0)


# --------------------------------------------------------------------------
# Homogeneous part
# --------------------------------------------------------------------------

def omega(fam: KernelFamily, w) -> np.ndarray:
    """Omega(w) = 2 int_0^inf F(s w) s^{d-1} e^{-s^2} ds for unit vectors w."""
    w = np.atleast_2d(np.asarray(w, dtype=float))
    s, ws = half_line_rule(192, 10.0)
    d = fam.dim
    vals = fam.F(s[None, :, None] * w[:, None, :])
    return 2.0 * np.sum(vals * (ws * s ** (d - 1) * np.exp(-s * s))[None, :], axis=-1)


def homogeneous_kernel(fam: KernelFamily, x) -> np.ndarray:
    """Omega(x/|x|) / |x|^d, the homogeneous kernel of degree -d."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    nx = np.linalg.norm(x, axis=-1)
    if np.any(nx == 0):
        raise ValueError("homogeneous kernel is singular at 0")
    return omega(fam, x / nx[:, None]) / nx ** fam.dim


def spherical_mean_omega(fam: KernelFamily, n: int = 64) -> float:
    w, ww = sphere_rule(fam.dim, n)
    return float(np.sum(omega(fam, w) * ww))


def diagonal_coefficient(fam: KernelFamily, n_dir: int = 64) -> float:
    """Multiple of f(x) that completes the principal value.

    Equals 1/2 phi_m(0) c_F with c_F = -2 int_0^inf log(s) A(s) e^{-s^2} s^{d-1} ds
    and A(s) the sphere integral of F(s .).  Zero for odd F.
    """
    w, ww = sphere_rule(fam.dim, n_dir)
    d = fam.dim
    edges = np.arange(-40.0, 3.0 + 1e-9, 0.25)
    lv, lw = composite_gauss_legendre(edges, 16)
    s = np.exp(lv)
    A = np.sum(fam.F(s[:, None, None] * w[None, :, :]) * ww[None, :], axis=-1)
    c_hom = -2.0 * np.sum(lw * lv * A * np.exp(-s * s) * s**d)
    phi0 = 2.0 ** (-(fam.m - 2) / 2)
    return 0.5 * phi0 * c_hom


# --------------------------------------------------------------------------
# Principal values
# --------------------------------------------------------------------------

@dataclass
class PVResult:
    value: float
    local: float
    global_: float
    diagonal: float
    sequence: list = field(default_factory=list)
    extrapolation_error: float = 0.0
    truncation_radius: float = 0.0


def _as_callable(f):
    if callable(f):
        return f
    if hasattr(f, "interpolator"):
        return f.interpolator()
    raise TypeError("f must be callable or a tensor GridFunction")


def _log_radial(a: float, b: float, width: float, order: int = 16):
    n = max(1, int(math.ceil(math.log(b / a) / width)))
    lv, lw = composite_gauss_legendre(np.linspace(math.log(a), math.log(b), n + 1), order)
    s = np.exp(lv)
    return s, lw * s


def _polar_sum(x, s, ws, fam, f, cfg, variant, mask_radius=None, group=None):
    d = x.size
    w, ww = sphere_rule(d, cfg.angular_points)
    Y = x[None, None, :] + s[:, None, None] * w[None, :, :]
    Y = Y.reshape(-1, d)
    wt = (ws * s ** (d - 1))[:, None] * ww[None, :]
    wt = wt.reshape(-1)
    fy = np.asarray(f(Y), dtype=float).reshape(-1)
    keep = fy != 0
    if mask_radius is not None:
        keep &= np.linalg.norm(Y, axis=-1) <= mask_radius
    contrib = np.zeros(Y.shape[0])
    if np.any(keep):
        K = kernel_values(np.broadcast_to(x, (int(keep.sum()), d)), Y[keep], fam, cfg, variant)
        contrib[keep] = K * fy[keep] * wt[keep]
    contrib = contrib.reshape(s.size, -1).sum(axis=1)
    if group is None:
        return float(contrib.sum())
    return np.array([contrib[g].sum() for g in group])


def _local_part(x, fam, f, cfg, variant):
    Rh = float(hyperbolic_radius(x))
    radii = Rh * np.asarray(cfg.pv_radii, dtype=float)
    s_out, w_out = _log_radial(radii[0], Rh, cfg.radial_log_width)
    segs = [(s_out, w_out)]
    for k in range(len(radii) - 1):
        segs.append(_log_radial(radii[k + 1], radii[k], math.log(radii[k] / radii[k + 1])))
    s = np.concatenate([a for a, _ in segs])
    ws = np.concatenate([b for _, b in segs])
    bounds = np.cumsum([0] + [a.size for a, _ in segs])
    group = [slice(bounds[i], bounds[i + 1]) for i in range(len(segs))]
    parts = _polar_sum(x, s, ws, fam, f, cfg, variant, group=group)
    seq = np.cumsum(parts)
    est = _extrapolate(radii, seq)
    err = float(abs(est[-1] - est[-2])) if est.size >= 2 else float(abs(seq[-1] - seq[-2]))
    return float(est[-1]), seq.tolist(), err


def _extrapolate(radii, seq):
    # partial integrals behave like S + A rho + B rho log rho; fit on sliding triples
    if seq.size < 3:
        return 2.0 * seq[1:] - seq[:-1]
    out = []
    for k in range(2, seq.size):
        r = radii[k - 2:k + 1]
        A = np.stack([np.ones(3), r, r * np.log(r)], axis=1)
        out.append(np.linalg.solve(A, seq[k - 2:k + 1])[0])
    return np.array(out)


def pv_apply(fam: KernelFamily, f, x, cfg: QuadratureConfig | None = None, variant: str = "new",
             check: bool = True) -> PVResult:
    """Principal value int K(x, y) f(y) dy plus the diagonal term.

    Local part: polar coordinates about x out to the hyperbolic radius, with
    dyadic exclusion radii; partial integrals are extrapolated to radius 0
    with the model S + A rho + B rho log rho and must settle to ``cfg.pv_tol``.  Global part:
    polar integral beyond the hyperbolic radius, truncated to |y| <= R.
    """
    cfg = QuadratureConfig() if cfg is None else cfg
    x = np.atleast_1d(np.asarray(x, dtype=float))
    f = _as_callable(f)
    loc, seq, err = _local_part(x, fam, f, cfg, variant)
    fx = float(np.asarray(f(x[None, :])).reshape(-1)[0])
    diag = diagonal_coefficient(fam) * fx if fam.m % 2 == 0 or fam.alpha is None else 0.0
    glob, R = _global_part(x, fam, f, cfg, variant)
    if check and err > cfg.pv_tol * (1.0 + abs(loc)):
        raise PVConvergenceError(f"principal value at {x} not settled: extrapolation error {err:.2e}")
    return PVResult(loc + diag + glob, loc + diag, glob, diag, seq, err, R)


def _global_part(x, fam, f, cfg, variant):
    Rh = float(hyperbolic_radius(x))
    R = cfg.truncation_radius(x)
    smax = R + float(np.linalg.norm(x))
    if smax <= Rh:
        return 0.0, R
    s, ws = _log_radial(Rh, smax, cfg.radial_log_width)
    return _polar_sum(x, s, ws, fam, f, cfg, variant, mask_radius=R), R


def local_global_split(fam: KernelFamily, f, x, cfg: QuadratureConfig | None = None,
                       variant: str = "new") -> tuple[float, float]:
    """(Lf(x), Gf(x)): integrals over the hyperbolic ball B(x) and its complement."""
    res = pv_apply(fam, f, x, cfg, variant)
    return res.local, res.global_


def calibrate_constant(alpha, variant: str = "old", cfg: QuadratureConfig | None = None, x=None) -> dict:
    """Fit the kernel constant from one eigenfunction.

    The unit-constant kernel is applied by principal value at
    x = 0.7 (1, ..., 1)/sqrt(d) to h_alpha (old) or h_{e_1} (new), and the
    spectral value is divided by the result.  The analytic constant is
    returned alongside for comparison.
    """
    from .hermite import HermiteExpansion, riesz, synthesize

    alpha = tuple(int(a) for a in alpha)
    d = len(alpha)
    x = 0.7 * np.ones(d) / math.sqrt(d) if x is None else np.asarray(x, dtype=float)
    if variant == "old":
        e = HermiteExpansion.basis(alpha)
    else:
        e = HermiteExpansion.basis((1,) + (0,) * (d - 1))
    spec = float(synthesize(riesz(alpha, e, variant), x[None, :])[0])
    unit = KernelFamily.hermite(alpha, 1.0)
    kern = pv_apply(unit, lambda y: synthesize(e, y), x, cfg, variant).value
    c = spec / kern
    return {"alpha": alpha, "variant": variant, "x": x.tolist(), "fitted": c,
            "analytic": analytic_constant(sum(alpha), d), "spectral_value": spec}
