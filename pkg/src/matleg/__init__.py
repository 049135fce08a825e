"""matleg: closed-form Legendre duality for non-convex determinant and
cofactor functionals on small dense matrices.

The heavy kernels (determinants, signed cofactors, minor grids and minor
gradients) run on a compiled extension when it was built, and on a
bit-identical pure-Python twin otherwise; see :func:`kernel_backend`.
"""
from .backend import kernel_backend
from .cofactor_transforms import (
    AREA_POWER,
    SUM_POWER,
    CofactorDual,
    CofactorFamily,
    DualCofactorGrid,
    area_functional,
    area_power,
    sum_power,
)
from .det_transforms import (
    DET_POWER,
    DET_ROOT,
    LOG_DET,
    ZERO_MANIFOLD,
    DetFamily,
    DomainWindow,
    conjugate_exponent,
    det_power,
    det_root,
    log_det,
    zero_on_unit_det,
)
from .duality_engine import CheckResult, DualityReport, SampleSpec, run_suite, sample_matrices
from .errors import (
    ConvergenceError,
    DimensionError,
    DomainError,
    MatlegError,
    NotInvertibleError,
    OffManifoldError,
    ParseError,
    SamplingError,
    SingularGradientError,
)
from .matrix_core import CofactorGrid, IndexSet, Matrix
from .variational import Problem, QuadraticForm, SolveResult, Witness

__version__ = "0.1.0"

__all__ = [
    "AREA_POWER",
    "CheckResult",
    "CofactorDual",
    "CofactorFamily",
    "CofactorGrid",
    "ConvergenceError",
    "DET_POWER",
    "DET_ROOT",
    "DetFamily",
    "DimensionError",
    "DomainError",
    "DomainWindow",
    "DualCofactorGrid",
    "DualityReport",
    "IndexSet",
    "LOG_DET",
    "MatlegError",
    "Matrix",
    "NotInvertibleError",
    "OffManifoldError",
    "ParseError",
    "Problem",
    "QuadraticForm",
    "SUM_POWER",
    "SampleSpec",
    "SamplingError",
    "SingularGradientError",
    "SolveResult",
    "Witness",
    "ZERO_MANIFOLD",
    "area_functional",
    "area_power",
    "conjugate_exponent",
    "det_power",
    "det_root",
    "kernel_backend",
    "log_det",
    "run_suite",
    "sample_matrices",
    "sum_power",
    "zero_on_unit_det",
    "__version__",
]
