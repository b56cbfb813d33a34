"""Fixed quadrature rules shared by the kernel, measure and spectral modules.

All rules return ``(nodes, weights)`` as numpy arrays so that integrands can
be evaluated in one vectorised call.  Batched variants take per-row interval
endpoints and return arrays with a leading batch axis.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=64)
def gauss_hermite_prob(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights integrating against the normalised density e^{-x^2}/sqrt(pi)."""
    x, w = np.polynomial.hermite.hermgauss(n)
    w = w / np.sqrt(np.pi)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_gauss_legendre(edges, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite rule over consecutive panels.

    ``edges`` has shape ``(..., K + 1)``; the result has shape ``(..., K * n)``.
    """
    edges = np.asarray(edges, dtype=float)
    x, w = gauss_legendre(n)
    lo = edges[..., :-1, None]
    hi = edges[..., 1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + hi) * 0.5 + half * x
    weights = half * w
    shape = edges.shape[:-1] + (-1,)
    return nodes.reshape(shape), weights.reshape(shape)


@lru_cache(maxsize=32)
def _tanh_sinh_unit(h: float, smax: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # nodes on (0, 1): t = (1 + tanh(pi/2 sinh s)) / 2, with 1 - t kept separately
    k = np.arange(-int(np.ceil(smax / h)), int(np.ceil(smax / h)) + 1)
    s = k * h
    arg = 0.5 * np.pi * np.sinh(s)
    t = 0.5 * (1.0 + np.tanh(arg))
    comp = 1.0 / (1.0 + np.exp(2.0 * arg))
    w = h * 0.25 * np.pi * np.cosh(s) / np.cosh(arg) ** 2
    keep = (t > 0.0) & (comp > 0.0) & (w > 0.0)
    out = (t[keep], comp[keep], w[keep])
    for a in out:
        a.setflags(write=False)
    return out


def tanh_sinh(a: float, b: float, h: float = 1.0 / 16, smax: float = 4.0):
    """Double-exponential rule on [a, b].

    Returns ``(nodes, dist_to_b, weights)``.  The distance to the right
    endpoint is computed without cancellation so that integrands such as
    ``(b - t)^{-1/2}`` can be evaluated accurately near ``b``.
    """
    t, comp, w = _tanh_sinh_unit(float(h), float(smax))
    span = b - a
    return a + span * t, span * comp, span * w


def half_line_rule(n: int = 96, upper: float = 10.0) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [0, upper] for Gaussian-damped integrands."""
    panels = max(1, n // 16)
    return composite_gauss_legendre(np.linspace(0.0, upper, panels + 1), 16)


@lru_cache(maxsize=32)
def sphere_rule(d: int, n: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Points on S^{d-1} and surface weights summing to |S^{d-1}|.

    d = 1 uses the two-point "sphere" {-1, +1}; d = 2 an equispaced circle
    rule (even ``n`` keeps antipodal pairs); d = 3 a Gauss-Legendre x
    trapezoid product rule.
    """
    if d == 1:
        pts, w = np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    elif d == 2:
        n = n + (n % 2)
        th = 2.0 * np.pi * (np.arange(n) + 0.5) / n
        pts = np.stack([np.cos(th), np.sin(th)], axis=-1)
        w = np.full(n, 2.0 * np.pi / n)
    elif d == 3:
        nz = max(4, n // 2)
        z, wz = gauss_legendre(nz)
        nphi = n + (n % 2)
        phi = 2.0 * np.pi * (np.arange(nphi) + 0.5) / nphi
        zz, pp = np.meshgrid(z, phi, indexing="ij")
        rr = np.sqrt(1.0 - zz**2)
        pts = np.stack([rr * np.cos(pp), rr * np.sin(pp), zz], axis=-1).reshape(-1, 3)
        w = (wz[:, None] * np.full(nphi, 2.0 * np.pi / nphi)[None, :]).reshape(-1)
    else:
        raise ValueError(f"sphere rule implemented for d <= 3, got d={d}")
    pts.setflags(write=False)
    w.setflags(write=False)
    return pts, w
