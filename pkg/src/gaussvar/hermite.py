"""Hermite expansions and the Ornstein-Uhlenbeck spectral calculus.

Expansions are stored in the orthonormal basis ``h_a = H_a / ||H_a||`` of
L^2(gamma_d), gamma_d(dx) = e^{-|x|^2} pi^{-d/2} dx, where ``H_a`` is the
tensor product of physicists' Hermite polynomials.  In this basis the ladder
operators act by

    delta_i   h_a = sqrt(a_i)     h_{a - e_i}
    delta_i^* h_a = sqrt(a_i + 1) h_{a + e_i}

and every operator of the calculus (L, L + I, semigroups, fractional
integrals, both Riesz families) is a coefficient map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Mapping

import numpy as np

from .quadrature import gauss_hermite_prob

MultiIndex = tuple[int, ...]

DEFAULT_DEGREE_CAP = {1: 12, 2: 8, 3: 6}


class TruncationError(ValueError):
    """Raising operator would push a nonzero coefficient past the degree cap."""


class QuadratureDegreeError(ValueError):
    """The quadrature supplied to :func:`analyze` is not exact to degree 2N."""


def multi_indices(d: int, N: int) -> list[MultiIndex]:
    """All multi-indices of length ``d`` with ``|a| <= N`` in graded-lex order."""
    out = [a for a in product(range(N + 1), repeat=d) if sum(a) <= N]
    out.sort(key=lambda a: (sum(a), tuple(-x for x in a)))
    return out


@dataclass(frozen=True)
class HermiteExpansion:
    """Finite expansion ``sum_a c_a h_a`` with ``|a| <= degree_cap``.

    Treated as an immutable value; operators return new instances.
    """

    dim: int
    degree_cap: int
    coeffs: Mapping[MultiIndex, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for a, c in self.coeffs.items():
            a = tuple(int(v) for v in a)
            if len(a) != self.dim or min(a) < 0:
                raise ValueError(f"bad multi-index {a} for dim {self.dim}")
            if sum(a) > self.degree_cap:
                raise ValueError(f"index {a} exceeds degree cap {self.degree_cap}")
            if c != 0.0:
                clean[a] = float(c)
        object.__setattr__(self, "coeffs", clean)

    def __getitem__(self, a) -> float:
        return self.coeffs.get(tuple(a), 0.0)

    def __add__(self, other: "HermiteExpansion") -> "HermiteExpansion":
        _check_dim(self, other)
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out.get(a, 0.0) + c
        return HermiteExpansion(self.dim, max(self.degree_cap, other.degree_cap), out)

    def __sub__(self, other: "HermiteExpansion") -> "HermiteExpansion":
        return self + other.scale(-1.0)

    def scale(self, s: float) -> "HermiteExpansion":
        return HermiteExpansion(self.dim, self.degree_cap, {a: s * c for a, c in self.coeffs.items()})

    def with_cap(self, N: int) -> "HermiteExpansion":
        return HermiteExpansion(self.dim, N, self.coeffs)

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def to_records(self) -> dict:
        """Serialisable record: header with d and N, then (index, coefficient) rows."""
        return {
            "dim": self.dim,
            "degree_cap": self.degree_cap,
            "coefficients": [[list(a), c] for a, c in sorted(self.coeffs.items())],
        }

    @classmethod
    def from_records(cls, rec: dict) -> "HermiteExpansion":
        return cls(rec["dim"], rec["degree_cap"], {tuple(a): c for a, c in rec["coefficients"]})

    @classmethod
    def basis(cls, a: Iterable[int], degree_cap: int | None = None) -> "HermiteExpansion":
        a = tuple(a)
        return cls(len(a), sum(a) if degree_cap is None else degree_cap, {a: 1.0})


def _check_dim(e: HermiteExpansion, f: HermiteExpansion) -> None:
    if e.dim != f.dim:
        raise ValueError(f"dimension mismatch: {e.dim} vs {f.dim}")


def max_coeff_error(e: HermiteExpansion, f: HermiteExpansion) -> float:
    """Largest coefficient difference over the union of supports."""
    _check_dim(e, f)
    keys = set(e.coeffs) | set(f.coeffs)
    return max((abs(e[a] - f[a]) for a in keys), default=0.0)


def random_expansion(d: int, N: int, rng: np.random.Generator, zero_constant: bool = False) -> HermiteExpansion:
    idx = multi_indices(d, N)
    vals = rng.standard_normal(len(idx))
    coeffs = dict(zip(idx, vals))
    if zero_constant:
        coeffs.pop((0,) * d)
    return HermiteExpansion(d, N, coeffs)


def project_constants_out(e: HermiteExpansion) -> HermiteExpansion:
    """I - pi_0: remove the constant mode."""
    out = dict(e.coeffs)
    out.pop((0,) * e.dim, None)
    return HermiteExpansion(e.dim, e.degree_cap, out)


# --------------------------------------------------------------------------
# Polynomials
# --------------------------------------------------------------------------

def hermite_eval(n: int, x):
    """Physicists' Hermite polynomial H_n(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    if n < 0:
        raise ValueError("n must be >= 0")
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev
    h = 2.0 * x
    for k in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return h


def hermite_norm_sq(a: Iterable[int]) -> float:
    """||H_a||^2 in L^2(gamma_d), i.e. prod_i 2^{a_i} a_i!."""
    total = 1
    for k in a:
        total *= (2**k) * math.factorial(k)
    try:
        return float(total)
    except OverflowError:
        raise OverflowError(f"||H_a||^2 not representable for a={tuple(a)}") from None


def normalized_hermite_table(n_max: int, x) -> np.ndarray:
    """Values h_0(x), ..., h_{n_max}(x) stacked along a new leading axis.

    Uses the normalised recurrence
    h_{n+1} = sqrt(2/(n+1)) x h_n - sqrt(n/(n+1)) h_{n-1}.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * x
    for n in range(1, n_max):
        out[n + 1] = np.sqrt(2.0 / (n + 1)) * x * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out


def hermite_multi(a: Iterable[int], x) -> np.ndarray:
    """Raw tensor Hermite polynomial H_a at points ``x`` of shape (..., d)."""
    x = np.asarray(x, dtype=float)
    out = np.ones(x.shape[:-1])
    for i, k in enumerate(a):
        if k:
            out = out * hermite_eval(k, x[..., i])
    return out


def hermite_multi_grad(a: Iterable[int], x) -> np.ndarray:
    """Gradient of H_a, using H_n' = 2n H_{n-1}."""
    a = tuple(a)
    x = np.asarray(x, dtype=float)
    grads = []
    for i in range(len(a)):
        if a[i] == 0:
            grads.append(np.zeros(x.shape[:-1]))
            continue
        g = 2.0 * a[i] * hermite_eval(a[i] - 1, x[..., i])
        for j, k in enumerate(a):
            if j != i and k:
                g = g * hermite_eval(k, x[..., j])
        grads.append(g)
    return np.stack(grads, axis=-1)


# --------------------------------------------------------------------------
# Ladder operators and spectral multipliers
# --------------------------------------------------------------------------

def _check_axis(axis: int, d: int) -> None:
    if not 0 <= axis < d:
        raise ValueError(f"axis must be in [0, {d}), got {axis}")


def apply_delta(axis: int, e: HermiteExpansion) -> HermiteExpansion:
    """delta_i = 2^{-1/2} d/dx_i; lowers index ``axis`` (0-based)."""
    _check_axis(axis, e.dim)
    out = {}
    for a, c in e.coeffs.items():
        if a[axis] == 0:
            continue
        b = a[:axis] + (a[axis] - 1,) + a[axis + 1:]
        out[b] = out.get(b, 0.0) + math.sqrt(a[axis]) * c
    return HermiteExpansion(e.dim, max(e.degree_cap - 1, 0), out)


def apply_delta_star(axis: int, e: HermiteExpansion, grow: bool = True) -> HermiteExpansion:
    """Gaussian adjoint of delta_i; raises index ``axis``.

    With ``grow=False`` the degree cap is kept and a :class:`TruncationError`
    is raised if a nonzero top-degree coefficient would be pushed past it.
    """
    _check_axis(axis, e.dim)
    if not grow and any(sum(a) == e.degree_cap for a in e.coeffs):
        raise TruncationError(f"delta* would exceed degree cap {e.degree_cap}")
    out = {}
    for a, c in e.coeffs.items():
        b = a[:axis] + (a[axis] + 1,) + a[axis + 1:]
        out[b] = out.get(b, 0.0) + math.sqrt(a[axis] + 1) * c
    return HermiteExpansion(e.dim, e.degree_cap + (1 if grow else 0), out)


def _multiplier(e: HermiteExpansion, fn: Callable[[int], float]) -> HermiteExpansion:
    return HermiteExpansion(e.dim, e.degree_cap, {a: fn(sum(a)) * c for a, c in e.coeffs.items()})


def _shift(variant: str) -> int:
    if variant in ("L", "old"):
        return 0
    if variant in ("L_bar", "new"):
        return 1
    raise ValueError(f"unknown variant {variant!r}")


def apply_ou(e: HermiteExpansion, variant: str = "L") -> HermiteExpansion:
    """L (eigenvalue |a|) or L_bar = L + I (eigenvalue |a| + 1)."""
    s = _shift(variant)
    return _multiplier(e, lambda n: float(n + s))


def semigroup(t: float, e: HermiteExpansion, variant: str = "L") -> HermiteExpansion:
    """T^t = e^{-tL} or e^{-t L_bar} as the multiplier e^{-t(|a| + shift)}."""
    if t < 0:
        raise ValueError("t must be >= 0")
    s = _shift(variant)
    if math.isinf(t):
        return _multiplier(e, lambda n: 1.0 if n + s == 0 else 0.0)
    return _multiplier(e, lambda n: math.exp(-t * (n + s)))


def fractional_integral(beta: float, e: HermiteExpansion, variant: str = "old") -> HermiteExpansion:
    """Negative spectral power L^{-beta} ("old") or (L + I)^{-beta} ("new").

    The old variant annihilates the constant mode, where L^{-beta} is
    undefined; at beta = 0 it therefore acts as I - pi_0.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")
    s = _shift(variant)

    def mult(n: int) -> float:
        lam = n + s
        if lam == 0:
            return 0.0
        return lam ** (-beta)

    return _multiplier(e, mult)


def riesz(alpha: Iterable[int], e: HermiteExpansion, variant: str = "old", grow: bool = True) -> HermiteExpansion:
    """Gaussian Riesz transform of order ``alpha`` (|alpha| >= 1).

    old:  R_a   = delta^a  L^{-|a|/2}
    new:  R*_a  = delta*^a (L + I)^{-|a|/2}
    """
    alpha = tuple(int(v) for v in alpha)
    if len(alpha) != e.dim:
        raise ValueError("alpha has wrong length")
    m = sum(alpha)
    if m < 1:
        raise ValueError("Riesz order must satisfy |alpha| >= 1")
    s = _shift(variant)
    out: dict[MultiIndex, float] = {}
    if s == 0:
        for b, c in e.coeffs.items():
            nb = sum(b)
            if nb == 0 or any(bi < ai for bi, ai in zip(b, alpha)):
                continue
            ladder = 1.0
            for bi, ai in zip(b, alpha):
                ladder *= math.sqrt(math.perm(bi, ai))
            key = tuple(bi - ai for bi, ai in zip(b, alpha))
            out[key] = out.get(key, 0.0) + nb ** (-m / 2) * ladder * c
        cap = max(e.degree_cap - m, 0)
    else:
        cap = e.degree_cap + m if grow else e.degree_cap
        for b, c in e.coeffs.items():
            if sum(b) + m > cap:
                raise TruncationError(f"R*_{alpha} would exceed degree cap {cap}")
            ladder = 1.0
            for bi, ai in zip(b, alpha):
                ladder *= math.sqrt(math.perm(bi + ai, ai))
            key = tuple(bi + ai for bi, ai in zip(b, alpha))
            out[key] = out.get(key, 0.0) + (sum(b) + 1) ** (-m / 2) * ladder * c
    return HermiteExpansion(e.dim, cap, out)


# --------------------------------------------------------------------------
# Basis change
# --------------------------------------------------------------------------

def synthesize(e: HermiteExpansion, x) -> np.ndarray:
    """Evaluate sum_a c_a h_a(x) at points ``x`` of shape (..., d)."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != e.dim:
        raise ValueError(f"points must have trailing dimension {e.dim}")
    if not e.coeffs:
        return np.zeros(x.shape[:-1])
    top = max(max(a) for a in e.coeffs)
    tables = [normalized_hermite_table(top, x[..., i]) for i in range(e.dim)]
    out = np.zeros(x.shape[:-1])
    for a, c in e.coeffs.items():
        term = np.full(x.shape[:-1], c)
        for i, k in enumerate(a):
            term = term * tables[i][k]
        out = out + term
    return out


def as_function(e: HermiteExpansion) -> Callable[[np.ndarray], np.ndarray]:
    return lambda x: synthesize(e, x)


def _tensor_gauss(d: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = gauss_hermite_prob(n)
    grids = np.meshgrid(*([x] * d), indexing="ij")
    pts = np.stack([g.reshape(-1) for g in grids], axis=-1)
    wts = np.ones(pts.shape[0])
    for wg in np.meshgrid(*([w] * d), indexing="ij"):
        wts = wts * wg.reshape(-1)
    return pts, wts


def analyze(f, d: int, N: int, n_quad: int | None = None, gram_tol: float = 1e-10) -> HermiteExpansion:
    """Project ``f`` onto {h_a : |a| <= N}.

    ``f`` is either a vectorised callable on points of shape (M, d), or a
    grid function (anything with ``points``, ``values`` and ``weights``
    attributes whose weights integrate against gamma_d).  Callables use a
    tensor Gauss-Hermite rule with ``n_quad >= N + 1`` nodes per axis, exact
    to degree 2N.  For grid functions exactness is checked on the Gram matrix
    of the basis, and :class:`QuadratureDegreeError` is raised on mismatch.
    """
    if hasattr(f, "points") and hasattr(f, "weights"):
        pts = np.asarray(f.points, dtype=float).reshape(-1, d)
        wts = np.asarray(f.weights, dtype=float)
        vals = np.asarray(f.values, dtype=float)
        idx = multi_indices(d, N)
        basis = np.stack([synthesize(HermiteExpansion.basis(a), pts) for a in idx])
        gram = (basis * wts) @ basis.T
        err = np.max(np.abs(gram - np.eye(len(idx))))
        if err > gram_tol:
            raise QuadratureDegreeError(f"grid quadrature not exact to degree {2 * N}: Gram error {err:.2e}")
        coeffs = (basis * wts) @ vals
        return HermiteExpansion(d, N, dict(zip(idx, coeffs)))
    n = N + 1 if n_quad is None else n_quad
    if n < N + 1:
        raise QuadratureDegreeError(f"{n} Gauss-Hermite nodes are exact only to degree {2 * n - 1} < {2 * N}")
    pts, wts = _tensor_gauss(d, n)
    vals = np.asarray(f(pts), dtype=float)
    idx = multi_indices(d, N)
    coeffs = {}
    for a in idx:
        coeffs[a] = float(np.sum(wts * vals * synthesize(HermiteExpansion.basis(a), pts)))
    return HermiteExpansion(d, N, coeffs)
