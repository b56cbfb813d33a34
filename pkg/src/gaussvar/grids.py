"""Sampled functions on rectangular boxes with measure-consistent weights."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.special import erf, erfc


def gaussian_interval_mass(a, b) -> np.ndarray:
    """gamma_1([a, b]) for the density e^{-x^2}/sqrt(pi), accurate in the tails."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    pos = a >= 0
    neg = b <= 0
    out = 0.5 * (erf(b) - erf(a))
    out = np.where(pos, 0.5 * (erfc(a) - erfc(b)), out)
    out = np.where(neg, 0.5 * (erfc(-b) - erfc(-a)), out)
    return out


def cell_weights(edges: Sequence[np.ndarray], measure: str) -> np.ndarray:
    """Exact measure of every cell of a tensor grid (flattened, C order)."""
    per_axis = []
    for e in edges:
        e = np.asarray(e, dtype=float)
        if measure == "gaussian":
            per_axis.append(gaussian_interval_mass(e[:-1], e[1:]))
        elif measure == "lebesgue":
            per_axis.append(np.diff(e))
        else:
            raise ValueError(f"unknown measure {measure!r}")
    w = per_axis[0]
    for wa in per_axis[1:]:
        w = np.multiply.outer(w, wa)
    return np.asarray(w).reshape(-1)


@dataclass(frozen=True)
class GridFunction:
    """Samples of a function with quadrature weights for a chosen measure.

    ``points`` has shape (M, d); ``values`` and ``weights`` shape (M,).
    Tensor grids built by :meth:`on_box` also keep their axes so that the
    samples can be interpolated and re-gridded.
    """

    points: np.ndarray
    values: np.ndarray
    weights: np.ndarray
    measure_tag: str = "gaussian"
    axes: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        wts = np.asarray(self.weights, dtype=float).reshape(-1)
        if not (pts.shape[0] == vals.size == wts.size):
            raise ValueError("points, values and weights must have equal length")
        if np.any(wts < 0):
            raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "weights", wts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @classmethod
    def on_box(cls, fn: Callable | float, box: tuple[float, float], n: int | Sequence[int],
               d: int = 1, measure: str = "gaussian") -> "GridFunction":
        """Cell-centred tensor grid on ``box^d`` with exact cell masses as weights."""
        lo, hi = box
        ns = [n] * d if np.isscalar(n) else list(n)
        edges = [np.linspace(lo, hi, k + 1) for k in ns]
        axes = tuple(0.5 * (e[:-1] + e[1:]) for e in edges)
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.reshape(-1) for m in mesh], axis=-1)
        vals = np.full(pts.shape[0], float(fn)) if np.isscalar(fn) else np.asarray(fn(pts), dtype=float)
        return cls(pts, vals, cell_weights(edges, measure), measure, axes)

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.points, np.asarray(values, dtype=float), self.weights, self.measure_tag, self.axes)

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        return self.with_values(fn(self.values))

    def interpolator(self, method: str = "cubic") -> Callable[[np.ndarray], np.ndarray]:
        """Callable interpolant on tensor grids, zero outside the box."""
        if self.axes is None:
            raise ValueError("interpolation needs a tensor grid")
        shape = tuple(len(a) for a in self.axes)
        rgi = RegularGridInterpolator(self.axes, self.values.reshape(shape), method=method,
                                      bounds_error=False, fill_value=0.0)

        def f(x):
            x = np.asarray(x, dtype=float)
            return rgi(x.reshape(-1, self.dim)).reshape(x.shape[:-1])

        return f

    def to_table(self) -> str:
        """Columnar text: coordinates, value, weight."""
        buf = io.StringIO()
        cols = [f"x{i}" for i in range(self.dim)] + ["value", "weight"]
        buf.write("\t".join(cols) + "\n")
        data = np.column_stack([self.points, self.values, self.weights])
        np.savetxt(buf, data, delimiter="\t", fmt="%.17g")
        return buf.getvalue()

    @classmethod
    def from_table(cls, text: str, measure_tag: str = "gaussian") -> "GridFunction":
        data = np.loadtxt(io.StringIO(text), delimiter="\t", skiprows=1, ndmin=2)
        return cls(data[:, :-2], data[:, -2], data[:, -1], measure_tag)
