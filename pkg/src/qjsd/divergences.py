"""Quantum divergences on the positive semidefinite cone.

All functions take complex ``numpy`` matrices. The ``*_batch`` variants take
stacks of shape ``(..., n, n)`` and skip per-matrix validation; they are the
workhorses of the randomized suites.

Values are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy.special import xlogy

from . import matcore
from .exceptions import DomainError, NumericalInconsistency, SingularInput, ValidationError

NEGATIVE_TOL = 1e-12


class DivergenceValue(float):
    """A nonnegative divergence in nats; ``inf`` encodes a support violation."""

    @property
    def finite(self) -> bool:
        return math.isfinite(self)

    def __repr__(self):
        return f"DivergenceValue({float(self)!r})"


def _clamp(value, scale=1.0):
    """Clamp round-off negatives to zero; raise on genuinely negative values.

    The tolerance is ``NEGATIVE_TOL * max(1, scale)`` where ``scale`` is the
    magnitude of the terms that were cancelled against each other.
    """
    value = np.asarray(value, dtype=float)
    tol = NEGATIVE_TOL * np.maximum(1.0, scale)
    bad = value < -tol
    if np.any(bad):
        worst = float(np.min(value[bad]))
        raise NumericalInconsistency(f"divergence evaluated to {worst:.6g} < 0")
    return np.where(value < 0, 0.0, value)


# ---------------------------------------------------------------------------
# scalar functions


@dataclass(frozen=True)
class ScalarFunction:
    """A named scalar function applied through the spectral calculus.

    ``positive_only`` functions (``-log``) need strictly positive spectra.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(compare=False, repr=False)
    positive_only: bool = False

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))

    def __str__(self):
        return self.name


def _neg_log(x):
    return -np.log(x)


def _square(x):
    return x * x


def eta() -> ScalarFunction:
    return ScalarFunction("eta", matcore.eta)


def neg_log() -> ScalarFunction:
    return ScalarFunction("neglog", _neg_log, positive_only=True)


def square() -> ScalarFunction:
    return ScalarFunction("square", _square)


def f_t(t: float) -> ScalarFunction:
    """``x -> t^3 / (t + x)`` for ``t > 0``."""
    t = float(t)
    if not t > 0:
        raise ValidationError(f"f_t needs t > 0, got {t}")
    return ScalarFunction(f"ft:{t:.15g}", lambda x: t**3 / (t + x))


def parse_function(spec: str) -> ScalarFunction:
    """Parse ``eta``, ``neglog``, ``square`` or ``ft:T``."""
    if spec == "eta":
        return eta()
    if spec in ("neglog", "neg_log"):
        return neg_log()
    if spec == "square":
        return square()
    if spec.startswith("ft:"):
        try:
            t = float(spec[3:])
        except ValueError:
            raise ValidationError(f"bad f_t parameter in {spec!r}") from None
        return f_t(t)
    raise ValidationError(f"unknown function {spec!r} (use eta, neglog, square or ft:T)")


@dataclass(frozen=True)
class OpConvexSpec:
    """``f(x) = a + b x + c x^2 + sum_i w_i t_i x^2 / (t_i + x)``.

    A discretized operator convex function on ``[0, inf)``; ``atoms`` holds
    the ``(t_i, w_i)`` pairs of the representing measure.
    """

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    atoms: tuple = ()
    positive_only = False

    def __post_init__(self):
        atoms = tuple((float(t), float(w)) for t, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if self.c < 0:
            raise ValidationError(f"quadratic weight must be >= 0, got {self.c}")
        for t, w in atoms:
            if not (t > 0 and w > 0):
                raise ValidationError(f"measure atoms need t > 0 and w > 0, got ({t}, {w})")
        grid = np.concatenate([[0.0], np.geomspace(1e-3, 1e3, 200)])
        vals = self(grid)
        second = _second_differences(grid, vals)
        if np.any(second < -1e-9):
            raise ValidationError("function is not convex on [0, inf)")

    @property
    def name(self):
        return f"opconvex(a={self.a:.6g}, b={self.b:.6g}, c={self.c:.6g}, atoms={len(self.atoms)})"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = self.a + self.b * x + self.c * x * x
        for t, w in self.atoms:
            out = out + w * t * x * x / (t + x)
        return out

    @classmethod
    def random(cls, rng: np.random.Generator, max_atoms: int = 4) -> "OpConvexSpec":
        k = int(rng.integers(1, max_atoms + 1))
        atoms = [(float(10 ** rng.uniform(-1.5, 1.5)), float(rng.exponential())) for _ in range(k)]
        return cls(a=float(rng.normal()), b=float(rng.normal()),
                   c=float(rng.exponential()), atoms=tuple(atoms))


def _second_differences(x, y):
    # divided second differences on a non-uniform grid
    h0 = x[1:-1] - x[:-2]
    h1 = x[2:] - x[1:-1]
    return 2 * ((y[2:] - y[1:-1]) / h1 - (y[1:-1] - y[:-2]) / h0) / (h0 + h1)


FunctionLike = Union[ScalarFunction, OpConvexSpec, str, Callable]


def _resolve(f: FunctionLike):
    if isinstance(f, str):
        return parse_function(f)
    return f


# ---------------------------------------------------------------------------
# spectral kernels (stacked eigenvalue arrays, last axis = spectrum)


def _entropy_sum(x, c):
    # sum_j x_j log(x_j / c); differs from tr eta by an affine term that cancels in J
    return np.sum(xlogy(x, x / c), axis=-1)


def qjsd_from_spectra(a, b, m):
    """QJSD from the spectra of ``A``, ``B`` and ``(A + B) / 2``.

    Returns ``(value, scale)`` before clamping. The logarithms are taken
    relative to the mean midpoint eigenvalue, which leaves ``J`` unchanged
    (affine terms cancel) but removes most of the cancellation for large
    or shifted inputs.
    """
    a, b, m = (np.maximum(s, 0.0) for s in (a, b, m))
    c = np.mean(m, axis=-1, keepdims=True)
    c = np.where(c > 0, c, 1.0)
    ta, tb, tm = _entropy_sum(a, c), _entropy_sum(b, c), _entropy_sum(m, c)
    value = 0.5 * ta + 0.5 * tb - tm
    scale = 0.5 * np.abs(ta) + 0.5 * np.abs(tb) + np.abs(tm)
    return value, scale


def jensen_from_spectra(f, a, b, m):
    """``1/2 (sum f(a) + sum f(b)) - sum f(m)`` on stacked spectra, unclamped."""
    with np.errstate(all="ignore"):
        fa, fb, fm = f(a), f(b), f(m)
    sa, sb, sm = np.sum(fa, axis=-1), np.sum(fb, axis=-1), np.sum(fm, axis=-1)
    value = 0.5 * (sa + sb) - sm
    if not np.all(np.isfinite(value)):
        raise DomainError(f"{getattr(f, 'name', 'function')} is undefined on the spectrum")
    scale = 0.5 * (np.abs(sa) + np.abs(sb)) + np.abs(sm)
    return value, scale


def sdiv_from_spectra(a, b, m):
    """``-1/2 sum log a - 1/2 sum log b + sum log m`` (scale invariant)."""
    c = np.mean(m, axis=-1, keepdims=True)
    la, lb, lm = np.log(a / c), np.log(b / c), np.log(m / c)
    value = np.sum(-0.5 * la - 0.5 * lb + lm, axis=-1)
    scale = np.sum(0.5 * np.abs(la) + 0.5 * np.abs(lb) + np.abs(lm), axis=-1)
    return value, scale


def _spectra(A, B):
    return (matcore.psd_spectrum(A), matcore.psd_spectrum(B),
            matcore.psd_spectrum((A + B) / 2))


# ---------------------------------------------------------------------------
# batch API


def qjsd_batch(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """QJSD of stacked PSD matrices ``A[i], B[i]`` (no validation)."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    matcore.same_dim(A, B)
    value, scale = qjsd_from_spectra(*_spectra(A, B))
    return _clamp(value, scale)


def s_divergence_sq_batch(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    matcore.same_dim(A, B)
    a, b, m = (matcore.eigvalsh(X) for X in (A, B, (A + B) / 2))
    if min(a.min(), b.min()) <= matcore.ZERO_EIG:
        raise SingularInput("S-divergence needs positive definite matrices")
    value, scale = sdiv_from_spectra(a, b, m)
    return _clamp(value, scale)


def jensen_f_batch(f: FunctionLike, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    f = _resolve(f)
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    matcore.same_dim(A, B)
    a, b, m = _spectra(A, B)
    if isinstance(f, ScalarFunction) and f.name == "eta":
        value, scale = qjsd_from_spectra(a, b, m)
    else:
        if getattr(f, "positive_only", False) and min(a.min(), b.min()) <= matcore.ZERO_EIG:
            raise DomainError(f"{f.name} needs positive definite inputs")
        value, scale = jensen_from_spectra(f, a, b, m)
    return _clamp(value, scale)


# ---------------------------------------------------------------------------
# single-pair API


def _pair(A, B):
    A = matcore.psd(A)
    B = matcore.psd(B)
    matcore.same_dim(A, B)
    return A, B


def qjsd(A, B) -> DivergenceValue:
    """Quantum Jensen-Shannon divergence

    ``J(A, B) = 1/2 tr eta(A) + 1/2 tr eta(B) - tr eta((A + B) / 2)``

    for PSD matrices of equal dimension (not necessarily normalized).
    """
    A, B = _pair(A, B)
    return DivergenceValue(qjsd_batch(A, B))


def qjsd_distance(A, B) -> float:
    """``sqrt(J(A, B))``, a metric on the PSD cone."""
    return math.sqrt(qjsd(A, B))


def s_divergence_sq(A, B) -> DivergenceValue:
    """Squared S-divergence ``-1/2 log det A - 1/2 log det B + log det((A+B)/2)``.

    Raises :class:`SingularInput` unless both matrices are positive definite.
    """
    A, B = _pair(A, B)
    return DivergenceValue(s_divergence_sq_batch(A, B))


def s_distance(A, B) -> float:
    return math.sqrt(s_divergence_sq(A, B))


def jensen_f_divergence(f: FunctionLike, A, B) -> DivergenceValue:
    """Symmetric quantum Jensen f-divergence

    ``J_f(A, B) = 1/2 (tr f(A) + tr f(B)) - tr f((A + B) / 2)``.

    ``f`` is a :class:`ScalarFunction`, an :class:`OpConvexSpec`, a name
    accepted by :func:`parse_function` or any vectorized callable.
    """
    A, B = _pair(A, B)
    return DivergenceValue(jensen_f_batch(f, A, B))


def relative_entropy(rho, sigma) -> DivergenceValue:
    """Umegaki relative entropy ``tr rho (log rho - log sigma)``.

    Returns ``inf`` when the support of ``rho`` is not contained in the
    support of ``sigma``; eigenvalues below ``1e-12`` count as zero.
    """
    rho = matcore.density(rho)
    sigma = matcore.density(sigma)
    matcore.same_dim(rho, sigma)
    p, u = np.linalg.eigh(rho)
    q, v = np.linalg.eigh(sigma)
    p = np.where(p < matcore.ZERO_EIG, 0.0, p)
    # weights[j, k] = p_j |<u_j|v_k>|^2
    overlap = np.abs(u.conj().T @ v) ** 2
    weights = p[:, None] * overlap
    kernel = q < matcore.ZERO_EIG
    if np.any(weights[:, kernel].sum(axis=0) > matcore.ZERO_EIG):
        return DivergenceValue(math.inf)
    logq = np.log(np.where(kernel, 1.0, q))
    first = math.fsum(xlogy(p, p))
    second = math.fsum((weights[:, ~kernel] * logq[~kernel]).ravel())
    value = first - second
    return DivergenceValue(_clamp(value, abs(first) + abs(second)))


def classical_jsd(p: Sequence[float], q: Sequence[float]) -> float:
    """Jensen-Shannon divergence of two nonnegative vectors (nats)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    m = (p + q) / 2
    return float(0.5 * np.sum(xlogy(p, p)) + 0.5 * np.sum(xlogy(q, q)) - np.sum(xlogy(m, m)))
