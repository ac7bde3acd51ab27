"""Hermitian spectral calculus.

Matrices are plain complex ``numpy`` arrays. The validators :func:`hermitian`,
:func:`psd` and :func:`density` play the role of refinement types: they check
the invariants of the corresponding matrix class and return a cleaned copy
(exactly Hermitian, tiny negative eigenvalues clamped).

Conventions
-----------
* ``eta(0) = 0`` (continuous extension of ``x log x``); natural logarithms.
* Eigenvalues in ``(-PSD_TOL, 0)`` are treated as zero; anything more negative
  is rejected rather than repaired.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import xlogy

from .exceptions import DimensionMismatch, DomainError, NonConvergence, ValidationError

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-12
# eigenvalues at or below this are "zero" for support / definiteness decisions
ZERO_EIG = 1e-12

ScalarFn = Callable[[np.ndarray], np.ndarray]


def eta(x):
    """Entropy function ``x log x`` with ``eta(0) = 0``."""
    return xlogy(x, x)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate a square Hermitian matrix and return ``(M + M^H) / 2``.

    The Hermiticity check is relative to ``max(1, max|M_jk|)``.
    """
    a = np.asarray(m)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError(f"expected a non-empty square matrix, got shape {a.shape}")
    a = a.astype(complex)
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(a))))
    skew = float(np.max(np.abs(a - a.conj().T)))
    if skew > tol * scale:
        raise ValidationError(f"matrix is not Hermitian (max |M - M^H| = {skew:.3g})")
    return (a + a.conj().T) / 2


def psd(m, tol: float = PSD_TOL) -> np.ndarray:
    """Validate a positive semidefinite matrix.

    Eigenvalues in ``(-tol, 0)`` are clamped to zero; a matrix with a more
    negative eigenvalue raises :class:`ValidationError`.
    """
    a = hermitian(m)
    w, v = _eigh(a)
    if w[0] < -tol:
        raise ValidationError(f"matrix is not positive semidefinite (min eigenvalue {w[0]:.6g})")
    if w[0] < 0:
        a = (v * np.maximum(w, 0.0)) @ v.conj().T
        a = (a + a.conj().T) / 2
    return a


def density(m, tol: float = TRACE_TOL) -> np.ndarray:
    """Validate a density matrix (PSD with unit trace)."""
    a = psd(m)
    tr = float(np.trace(a).real)
    if abs(tr - 1.0) > tol:
        raise ValidationError(f"density matrix must have unit trace, got {tr!r}")
    return a


def same_dim(*mats: np.ndarray) -> int:
    dims = {m.shape[-1] for m in mats}
    if len(dims) != 1:
        raise DimensionMismatch(f"matrices have different dimensions {sorted(dims)}")
    return dims.pop()


@dataclass(frozen=True)
class SpectralDecomposition:
    """``M = U diag(eigenvalues) U^H`` with eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def _eigh(a: np.ndarray):
    try:
        return np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(f"Hermitian eigensolver failed: {exc}") from exc


def eigvalsh(a: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix or a stack of them."""
    try:
        return np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(f"Hermitian eigensolver failed: {exc}") from exc


def psd_spectrum(a: np.ndarray) -> np.ndarray:
    """Eigenvalues of (a stack of) PSD matrices with round-off negatives set to 0."""
    return np.maximum(eigvalsh(a), 0.0)


def eigen_decompose(m) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    LAPACK ``heevd`` already returns ascending eigenvalues; ties keep the
    solver's order, which is deterministic for identical input bits.
    """
    a = hermitian(m)
    w, v = _eigh(a)
    return SpectralDecomposition(w, v)


def _apply(f: ScalarFn, w: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w), dtype=float)
    if fw.shape != w.shape:
        fw = np.broadcast_to(fw, w.shape)
    if not np.all(np.isfinite(fw)):
        bad = w[~np.isfinite(fw)]
        raise DomainError(f"function undefined at eigenvalue(s) {bad.tolist()}")
    return fw


def trace_fn(m, f: ScalarFn) -> float:
    """``tr f(M) = sum_j f(lambda_j)`` for a PSD matrix ``M``.

    ``f`` must accept an array of eigenvalues. Pass :func:`eta` for the
    entropy function; its value at 0 is 0.
    """
    w = np.maximum(eigvalsh(psd(m)), 0.0)
    return math.fsum(_apply(f, w))


def matrix_fn(m, f: ScalarFn) -> np.ndarray:
    """Spectral calculus ``f(M) = U f(Lambda) U^H`` for a PSD matrix."""
    dec = eigen_decompose(psd(m))
    w = np.maximum(dec.eigenvalues, 0.0)
    u = dec.eigenvectors
    out = (u * _apply(f, w)) @ u.conj().T
    return (out + out.conj().T) / 2


def is_psd(m, tol: float = 0.0) -> bool:
    """True iff the smallest eigenvalue of the Hermitian matrix is ``>= -tol``."""
    return bool(eigvalsh(hermitian(m))[0] >= -tol)
