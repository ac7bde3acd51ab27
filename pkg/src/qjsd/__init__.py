"""Quantum Jensen-Shannon divergence and related quantum divergences.

Numerical tools for the QJSD, the S-divergence and quantum Jensen
f-divergences on positive semidefinite matrices, plus randomized suites that
check their metric and embedding properties.
"""

from .divergences import (
    DivergenceValue,
    OpConvexSpec,
    ScalarFunction,
    jensen_f_divergence,
    qjsd,
    qjsd_distance,
    relative_entropy,
    s_distance,
    s_divergence_sq,
)
from .exceptions import (
    AsymmetricInput,
    DimensionMismatch,
    DomainError,
    FormatError,
    NonConvergence,
    NotEmbeddable,
    NumericalInconsistency,
    QJSDError,
    SingularInput,
    ValidationError,
)
from .matcore import eigen_decompose, is_psd, matrix_fn, trace_fn

__version__ = "0.1.0"
