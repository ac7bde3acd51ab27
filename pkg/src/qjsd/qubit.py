"""Qubit geometry and Hilbert-space embedding of Jensen divergences.

Qubit states are parametrized by Bloch vectors ``r`` in the closed unit ball,
``rho = (I + r . sigma) / 2``. For operator convex ``f`` the kernel
``J_f(rho_j, rho_k)`` is negative definite on qubit states, so its square
root embeds isometrically into Euclidean space; :func:`centered_kernel_check`
tests this on a finite point set and :func:`mds_embed` builds the embedding
by classical multidimensional scaling.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import helmert

from . import matcore
from .divergences import (
    NEGATIVE_TOL,
    FunctionLike,
    ScalarFunction,
    _clamp,
    _resolve,
    f_t,
    jensen_from_spectra,
    qjsd_from_spectra,
)
from .exceptions import (
    AsymmetricInput,
    DimensionMismatch,
    DomainError,
    NotEmbeddable,
    NumericalInconsistency,
    ValidationError,
)

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

BLOCH_TOL = 1e-12
DEFINITE_TOL = 1e-10


def bloch_vector(r) -> np.ndarray:
    """Validate a Bloch vector (real 3-vector of norm at most 1)."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3,) or not np.all(np.isfinite(r)):
        raise ValidationError(f"Bloch vector must be a finite real 3-vector, got {r!r}")
    norm = float(np.linalg.norm(r))
    if norm > 1 + BLOCH_TOL:
        raise ValidationError(f"Bloch vector outside the unit ball (norm {norm!r})")
    return r


def bloch_points(points) -> np.ndarray:
    """Validate an ``(m, 3)`` array of Bloch vectors."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValidationError(f"expected an (m, 3) array of Bloch vectors, got shape {pts.shape}")
    norms = np.linalg.norm(pts, axis=1)
    if np.any(norms > 1 + BLOCH_TOL) or not np.all(np.isfinite(pts)):
        raise ValidationError("Bloch vectors must lie in the closed unit ball")
    return pts


def bloch_to_density(r) -> np.ndarray:
    r = bloch_vector(r)
    return 0.5 * (np.eye(2) + np.tensordot(r, PAULI, axes=1))


def density_to_bloch(rho) -> np.ndarray:
    """Components ``r_k = tr(rho sigma_k)`` of a qubit density matrix."""
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        raise DimensionMismatch(f"Bloch vectors need 2x2 densities, got shape {rho.shape}")
    rho = matcore.density(rho)
    return np.einsum("ij,kji->k", rho, PAULI).real


def mid_eigenvalues(rj, rk):
    """Closed-form eigenvalues of ``(rho_j + rho_k) / 2``, ascending."""
    s = float(np.linalg.norm((bloch_vector(rj) + bloch_vector(rk)) / 2))
    return 0.5 * (1 - s), 0.5 * (1 + s)


# ---------------------------------------------------------------------------
# kernels


class Verdict(str, Enum):
    NEGATIVE_DEFINITE = "negative_definite"
    VIOLATED = "violated"


@dataclass(frozen=True)
class KernelReport:
    """Centered-kernel analysis of a divergence matrix.

    ``centered_spectrum`` holds the ascending eigenvalues of ``1/2 H D H``
    (``H`` the centering projector), one of which is the trivial 0 of the
    all-ones vector. ``max_centered_eigenvalue`` is the largest eigenvalue
    on the zero-sum subspace: ``D`` is negative definite there iff it is
    ``<= 0``. ``gram`` is ``-1/2 H D H``.
    """

    kernel: np.ndarray
    centered_spectrum: np.ndarray
    verdict: Verdict
    max_centered_eigenvalue: float
    gram: np.ndarray
    tolerance: float

    @property
    def negative_definite(self) -> bool:
        return self.verdict is Verdict.NEGATIVE_DEFINITE

    def to_dict(self):
        return dict(
            verdict=self.verdict.value,
            max_centered_eigenvalue=self.max_centered_eigenvalue,
            tolerance=self.tolerance,
            centered_spectrum=self.centered_spectrum.tolist(),
            kernel=self.kernel.tolist(),
        )


@dataclass(frozen=True)
class EmbeddingResult:
    coordinates: np.ndarray
    residual: float

    @property
    def dim(self) -> int:
        return self.coordinates.shape[1]

    def squared_distances(self) -> np.ndarray:
        return _squared_distances(self.coordinates)

    def to_dict(self):
        return dict(dim=self.dim, residual=self.residual, coordinates=self.coordinates.tolist())


def _squared_distances(x):
    diff = x[:, None, :] - x[None, :, :]
    return np.sum(diff * diff, axis=-1)


def as_states(points) -> np.ndarray:
    """Turn Bloch vectors ``(m, 3)`` or matrices ``(m, n, n)`` into a matrix stack."""
    pts = np.asarray(points)
    if pts.ndim == 2 and pts.shape[1] == 3 and not np.iscomplexobj(pts):
        pts = bloch_points(pts)
        return 0.5 * (np.eye(2) + np.tensordot(pts, PAULI, axes=1))
    if pts.ndim == 3 and pts.shape[1] == pts.shape[2]:
        return np.stack([matcore.psd(p) for p in pts])
    raise ValidationError(f"cannot interpret point set of shape {pts.shape}")


@dataclass(frozen=True)
class PairSpectra:
    """Spectra of every state and every pairwise midpoint of a point set."""

    points: np.ndarray
    mids: np.ndarray

    @classmethod
    def of(cls, points) -> "PairSpectra":
        states = as_states(points)
        m = states.shape[0]
        if m < 2:
            raise ValidationError("a point set needs at least two points")
        own = matcore.psd_spectrum(states)
        mids = matcore.psd_spectrum((states[:, None] + states[None, :]) / 2)
        return cls(own, mids)

    def kernel(self, f: FunctionLike) -> np.ndarray:
        """``K[j, k] = J_f(state_j, state_k)``."""
        f = _resolve(f)
        a = self.points[:, None, :]
        b = self.points[None, :, :]
        a, b = np.broadcast_arrays(a, b)
        if isinstance(f, ScalarFunction) and f.name == "eta":
            value, scale = qjsd_from_spectra(a, b, self.mids)
        else:
            if getattr(f, "positive_only", False) and self.points.min() <= matcore.ZERO_EIG:
                raise DomainError(f"{f.name} needs positive definite states")
            value, scale = jensen_from_spectra(f, a, b, self.mids)
        k = _clamp(value, scale)
        np.fill_diagonal(k, 0.0)
        return (k + k.T) / 2


def jensen_kernel(points, f: FunctionLike = "eta") -> np.ndarray:
    """Pairwise ``J_f`` matrix of a point set (Bloch vectors or matrices)."""
    return PairSpectra.of(points).kernel(f)


def _ft_trace(r1, r2, t):
    # tr f_t((rho_1 + rho_2) / 2) from the Bloch vectors
    s2 = np.sum(((r1 + r2) / 4) ** 2, axis=-1)
    return (2 * t**4 + t**3) / ((t + 0.5) ** 2 - s2)


def ft_kernel(points, t: float) -> np.ndarray:
    """``J_{f_t}`` kernel from the closed-form Bloch expression."""
    pts = bloch_points(points)
    full = _ft_trace(pts[:, None, :], pts[None, :, :], t)
    own = np.diag(full)
    k = 0.5 * (own[:, None] + own[None, :]) - full
    np.fill_diagonal(k, 0.0)
    return _clamp((k + k.T) / 2, np.abs(full))


def ft_kernel_matrix(points, t: float, cross_check: bool = True) -> KernelReport:
    """Kernel report for ``f_t(x) = t^3 / (t + x)`` on a qubit point set.

    The closed form is compared with the generic spectral evaluation; a
    mismatch above ``1e-12`` (relative to the kernel scale) raises
    :class:`NumericalInconsistency`.
    """
    k = ft_kernel(points, t)
    if cross_check:
        generic = jensen_kernel(points, f_t(t))
        gap = float(np.max(np.abs(k - generic)))
        if gap > 1e-12 * max(1.0, float(np.max(np.abs(k)))):
            raise NumericalInconsistency(f"closed-form f_t kernel differs from spectral path by {gap:.3g}")
    return centered_kernel_check(k)


def centered_kernel_check(kernel, tol: float = DEFINITE_TOL) -> KernelReport:
    """Decide whether ``sum_jk c_j c_k D_jk <= 0`` for every zero-sum ``c``.

    Equivalent to positive semidefiniteness of ``K_c = -1/2 H D H``. The
    verdict is ``negative_definite`` iff the smallest eigenvalue of ``K_c``
    is ``>= -tol * max(1, ||K_c||_2)``.
    """
    d = np.asarray(kernel, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValidationError(f"kernel must be square, got shape {d.shape}")
    m = d.shape[0]
    scale = max(1.0, float(np.max(np.abs(d)))) if d.size else 1.0
    if np.max(np.abs(d - d.T)) > NEGATIVE_TOL * scale:
        raise AsymmetricInput("kernel matrix is not symmetric")
    if np.max(np.abs(np.diag(d))) > NEGATIVE_TOL * scale:
        raise AsymmetricInput("kernel diagonal must vanish")
    d = (d + d.T) / 2
    h = np.eye(m) - np.full((m, m), 1.0 / m)
    gram = -0.5 * h @ d @ h
    gram = (gram + gram.T) / 2
    # orthonormal basis of the zero-sum subspace; the all-ones direction
    # carries the trivial eigenvalue 0 and is added back explicitly
    basis = helmert(m)
    restricted = np.linalg.eigvalsh(0.5 * basis @ d @ basis.T)
    centered = np.sort(np.append(restricted, 0.0))
    norm = float(np.max(np.abs(restricted)))
    threshold = tol * max(1.0, norm)
    top = float(restricted[-1])
    verdict = Verdict.NEGATIVE_DEFINITE if top <= threshold else Verdict.VIOLATED
    return KernelReport(d, centered, verdict, top, gram, threshold)


def kernel_check(points, f: FunctionLike = "eta") -> KernelReport:
    return centered_kernel_check(jensen_kernel(points, f))


def mds_embed(report: KernelReport, tol: float = DEFINITE_TOL) -> EmbeddingResult:
    """Classical MDS: coordinates whose squared distances reproduce the kernel.

    Keeps the eigenvalues of ``K_c`` above ``tol * ||K_c||_2``, largest first.
    """
    if not report.negative_definite:
        raise NotEmbeddable(
            f"kernel is not negative definite (max centered eigenvalue {report.max_centered_eigenvalue:.3g})"
        )
    w, v = np.linalg.eigh(report.gram)
    w, v = w[::-1], v[:, ::-1]
    norm = float(np.max(np.abs(w))) if w.size else 0.0
    keep = w > tol * norm
    if not np.any(keep):
        coords = np.zeros((report.kernel.shape[0], 1))
    else:
        coords = v[:, keep] * np.sqrt(w[keep])
    residual = float(np.max(np.abs(_squared_distances(coords) - report.kernel)))
    return EmbeddingResult(coords, residual)


def cls_pd_kernel_check(points, t: float) -> float:
    """Smallest eigenvalue of ``G_jk = 1 / (1 - ||(r_j + r_k) / (4t + 2)||^2)``."""
    if not t > 0:
        raise ValidationError("t must be positive")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    pts = bloch_points(pts)
    s = (pts[:, None, :] + pts[None, :, :]) / (4 * t + 2)
    g = 1.0 / (1.0 - np.sum(s * s, axis=-1))
    return float(np.linalg.eigvalsh(g)[0])


def briet_harremoes_counterexample():
    """The 2x2 matrix of ``g(a, b) = 2 tr((a + b)/2)^2 - 1`` on ``{diag(1,0), I/2}``.

    ``g`` was claimed to be a positive definite kernel; this matrix is
    ``[[1, 1/4], [1/4, 0]]``, which is indefinite. Returns the matrix and its
    eigenvalues in descending order.
    """
    states = [np.diag([1.0, 0.0]), np.eye(2) / 2]

    def g(x, y):
        mid = (x + y) / 2
        return 2 * np.trace(mid @ mid).real - 1

    mat = np.array([[g(x, y) for y in states] for x in states])
    eig = np.linalg.eigvalsh(mat)[::-1]
    if not (eig[0] > 0 > eig[1]):
        raise NumericalInconsistency(f"expected an indefinite matrix, got eigenvalues {eig}")
    return mat, (float(eig[0]), float(eig[1]))
