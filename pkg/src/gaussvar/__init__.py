"""Gaussian Riesz transforms and the Gaussian maximal function on variable
Lebesgue spaces: exponent conditions, Gaussian ball measures, Luxemburg
norms, Hermite spectral calculus, kernel quadrature and maximal-function
experiments.
"""

import os as _os

# Thread count for the BLAS/OpenMP pools; must be set before numpy loads.
_n = _os.environ.get("GAUSSVAR_THREADS")
if _n is not None and _n.isdigit() and int(_n) > 0:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _n)

__version__ = "0.1.0"

from .exponents import ExponentSpec, conjugate_exponent, get_spec, registry  # noqa: E402
from .gauss_measure import GAUSSIAN, Ball, BallFamily, MeasureHandle, measure_ball  # noqa: E402
from .grids import GridFunction  # noqa: E402
from .hermite import HermiteExpansion, riesz, synthesize  # noqa: E402
from .kernels import KernelFamily, QuadratureConfig, pv_apply  # noqa: E402
from .maximal import MaximalInstance, maximal_apply  # noqa: E402
from .norms import luxemburg_norm, modular  # noqa: E402

__all__ = [
    "Ball", "BallFamily", "ExponentSpec", "GAUSSIAN", "GridFunction", "HermiteExpansion", "KernelFamily",
    "MaximalInstance", "MeasureHandle", "QuadratureConfig", "conjugate_exponent", "get_spec",
    "luxemburg_norm", "maximal_apply", "measure_ball", "modular", "pv_apply", "registry", "riesz",
    "synthesize",
]
