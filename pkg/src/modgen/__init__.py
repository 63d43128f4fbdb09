"""Numerical one-particle modular generators for the free Majorana field.

The package discretizes the time-0 data of the field on a spatial grid of
box functions, assembles the skew-symmetric generator of the quarter
rotation from closed-form antiderivatives, and composes the spectral chain
that produces the off-diagonal modular-generator block together with its
analytic references for validation.  All heavy arithmetic runs on MPFR at
an explicit decimal-digit working precision.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    ConfigMismatch,
    DomainError,
    ExportError,
    InvalidRegion,
    ModgenError,
    NonConvergence,
    QuadratureFailure,
    RootNotBracketed,
    SpectrumOutOfRange,
)
from .precision import BigReal, from_decimal, to_decimal, working_precision
from .linalg import (
    BigMatrix,
    SkewCanonical,
    SymmetricEigen,
    artanh_sym,
    jacobi_eigen_sym,
    orthogonal_function_of_skew,
    skew_canonical,
    spectral_map_sym,
    tanh_sym,
)
