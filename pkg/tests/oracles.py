"""Reference values computed independently of the package.

Run ``python tests/oracles.py`` to regenerate ``tests/golden/oracles.json``.
The tests only read the frozen file, so a change in the package can never
move its own reference values.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from numpy.polynomial import hermite as nph
from scipy import integrate, optimize

FROZEN = Path(__file__).parent / "golden" / "oracles.json"


def hermite_values():
    """H_n(x) from numpy's physicists' Hermite series."""
    xs = [-1.3, 0.0, 0.4, 1.0, 2.5]
    out = []
    for n in range(9):
        c = np.zeros(n + 1)
        c[n] = 1.0
        out.append([n, xs, nph.hermval(xs, c).tolist()])
    return out


def gaussian_ball_1d():
    """gamma_1([c - r, c + r]) by the error function."""
    out = []
    for c, r in [(0.0, 1.0), (0.0, 0.25), (1.5, 0.5), (-3.0, 1.0), (4.0, 0.1), (0.3, 6.0)]:
        out.append([c, r, 0.5 * (math.erf(c + r) - math.erf(c - r))])
    return out


def gaussian_ball_2d():
    """gamma_2(B) by nested adaptive quadrature in Cartesian coordinates."""
    out = []
    for c, r in [((0.0, 0.0), 1.0), ((1.0, 0.5), 0.3), ((2.0, 0.0), 1.0), ((-0.5, 2.5), 0.75)]:
        cx, cy = c

        def inner(x):
            h = math.sqrt(max(r * r - (x - cx) ** 2, 0.0))
            return math.exp(-x * x) * 0.5 * (math.erf(cy + h) - math.erf(cy - h)) * math.sqrt(math.pi)

        val, _ = integrate.quad(inner, cx - r, cx + r, epsabs=0, epsrel=1e-13, limit=200)
        out.append([list(c), r, val / math.pi])
    return out


def golden_t0_u0():
    """Minimiser of u(t) = |y - sqrt(1-t) x|^2 / t over (0, 1] by bounded scalar search."""
    pairs = [((2.0, 0.0), (3.0, 0.0)), ((1.0, 1.0), (2.0, -0.5)), ((0.5, 0.2), (0.4, 1.5)),
             ((1.0,), (-2.0,)), ((3.0,), (1.0,)), ((0.0, 1.0), (0.0, 4.0))]
    out = []
    for x, y in pairs:
        X, Y = np.array(x), np.array(y)

        def u(t):
            return float(np.sum((Y - math.sqrt(1 - t) * X) ** 2) / t)

        res = optimize.minimize_scalar(u, bounds=(1e-12, 1.0), method="bounded",
                                       options={"xatol": 1e-13, "maxiter": 2000})
        t, val = float(res.x), float(res.fun)
        if u(1.0) <= val:
            t, val = 1.0, u(1.0)
        out.append([list(x), list(y), t, val])
    return out


def two_valued_luxemburg():
    """lambda with m1 lambda^{-p1} + m2 lambda^{-p2} = 1."""
    out = []
    for m1, m2, p1, p2 in [(0.3, 0.2, 2.0, 3.0), (0.05, 0.6, 1.5, 4.0), (0.8, 0.15, 2.5, 1.2)]:
        lam = optimize.brentq(lambda l: m1 * l ** -p1 + m2 * l ** -p2 - 1.0, 1e-6, 1e6, xtol=1e-15, rtol=1e-15)
        out.append([m1, m2, p1, p2, lam])
    return out


def kernel_r_integrals():
    """New-kernel integral in the variable r for F = c H_a, computed from scratch."""
    cases = [((0.7,), (-0.4,), (1,)), ((0.3,), (1.9,), (2,)), ((1.2,), (0.5,), (3,)),
             ((0.5, -0.2), (1.1, 0.9), (1, 0)), ((0.4, 0.4), (-0.8, 1.0), (1, 1))]
    out = []
    for x, y, a in cases:
        X, Y = np.array(x), np.array(y)
        d, m = X.size, sum(a)
        c = 2.0 ** (-m / 2) * math.pi ** (-d / 2) / math.gamma(m / 2)

        def F(z):
            val = 1.0
            for zi, ai in zip(z, a):
                coef = np.zeros(ai + 1)
                coef[ai] = 1.0
                val *= float(nph.hermval(zi, coef))
            return c * val

        def f(r):
            s2 = 1.0 - r * r
            z = (X - r * Y) / math.sqrt(s2)
            return (-math.log(r)) ** ((m - 2) / 2) * s2 ** (-(m + d) / 2) * F(z) * math.exp(-np.sum((Y - r * X) ** 2) / s2)

        val, _ = integrate.quad(f, 0.0, 1.0, epsabs=1e-15, epsrel=1e-12, limit=2000,
                                points=[0.1, 0.5, 0.9, 0.99])
        out.append([list(x), list(y), list(a), val])
    return out


def build() -> dict:
    return {
        "hermite": hermite_values(),
        "gaussian_ball_1d": gaussian_ball_1d(),
        "gaussian_ball_2d": gaussian_ball_2d(),
        "t0_u0": golden_t0_u0(),
        "two_valued_luxemburg": two_valued_luxemburg(),
        "kernel_r": kernel_r_integrals(),
    }


def load() -> dict:
    return json.loads(FROZEN.read_text())


if __name__ == "__main__":
    FROZEN.parent.mkdir(exist_ok=True)
    FROZEN.write_text(json.dumps(build(), indent=1) + "\n")
    print(f"wrote {FROZEN}")
