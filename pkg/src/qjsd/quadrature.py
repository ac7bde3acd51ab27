"""Numerical check of the integral representation of the QJSD.

For PSD ``A, B`` the QJSD satisfies

    J(A, B) = int_0^inf d_S^2(A + tI, B + tI) dt,

with ``d/dt J(A + tI, B + tI) = -d_S^2(A + tI, B + tI)``. The integral over
``[0, T]`` is computed by composite Gauss-Legendre quadrature on panels that
refine geometrically toward ``t = 0`` (the integrand has a logarithmic
singularity there when ``A`` or ``B`` is singular). The remainder
``int_T^inf`` is exactly ``J(A + TI, B + TI)``.

Shifted quantities are evaluated from the spectra of ``A``, ``B`` and
``(A + B) / 2`` since ``eig(A + tI) = eig(A) + t``; logarithms are taken
relative to ``t`` so no ``log t`` cancellation occurs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import matcore
from .divergences import _clamp, qjsd, qjsd_batch
from .exceptions import SingularInput, ValidationError


@dataclass(frozen=True)
class QuadratureConfig:
    cutoff: float = 100.0
    panels: int = 64
    nodes_per_panel: int = 16
    ratio: float = 2.0

    def __post_init__(self):
        if not self.cutoff > 0:
            raise ValidationError("cutoff must be positive")
        if self.panels < 1:
            raise ValidationError("need at least one panel")
        if self.nodes_per_panel < 2:
            raise ValidationError("need at least two nodes per panel")
        if not self.ratio > 1:
            raise ValidationError("panel ratio must exceed 1")


@dataclass(frozen=True)
class RepresentationReport:
    closed_form: float
    quadrature_part: float
    tail_part: float
    abs_error: float
    cutoff: float
    panels: int

    def to_dict(self):
        return dict(closed_form=self.closed_form, quadrature_part=self.quadrature_part,
                    tail_part=self.tail_part, abs_error=self.abs_error,
                    cutoff=self.cutoff, panels=self.panels)


def graded_edges(lower: float, upper: float, panels: int, ratio: float = 2.0) -> np.ndarray:
    """Panel edges on ``[lower, upper]`` shrinking geometrically toward ``lower``.

    With ``lower = 0`` the first panel is ``[0, upper * ratio**-(panels-1)]``.
    For ``lower > 0`` the widths form a geometric sequence (ratio fixed by
    ``panels``, ``ratio`` ignored).
    """
    if lower == 0:
        inner = upper * ratio ** -np.arange(panels - 1, -1, -1, dtype=float)
        return np.concatenate([[0.0], inner])
    return np.geomspace(lower, upper, panels + 1)


_RULES: dict = {}


def _rule(n):
    if n not in _RULES:
        _RULES[n] = leggauss(n)
    return _RULES[n]


def gauss_legendre(f: Callable[[np.ndarray], np.ndarray], edges: np.ndarray, nodes: int = 16) -> float:
    """Composite Gauss-Legendre estimate of ``int f`` over the given panels.

    ``f`` is called once with every node; nodes never touch the panel edges.
    The weighted values are summed with ``math.fsum`` so the result does not
    depend on evaluation order.
    """
    x, w = _rule(nodes)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = (hi - lo) / 2
    t = (lo + hi) / 2 + half * x[None, :]
    vals = np.asarray(f(t.ravel()), dtype=float).reshape(t.shape)
    return math.fsum((vals * (half * w[None, :])).ravel())


# ---------------------------------------------------------------------------
# shifted divergences from spectra


def _pair_spectra(A, B):
    A = matcore.psd(A)
    B = matcore.psd(B)
    matcore.same_dim(A, B)
    return (matcore.psd_spectrum(A), matcore.psd_spectrum(B),
            matcore.psd_spectrum((A + B) / 2))


def shifted_sdiv(spectra, t) -> np.ndarray:
    """``d_S^2(A + tI, B + tI)`` for an array of ``t > 0``."""
    a, b, m = spectra
    t = np.asarray(t, dtype=float)[..., None]
    terms = -0.5 * np.log1p(a / t) - 0.5 * np.log1p(b / t) + np.log1p(m / t)
    return np.sum(terms, axis=-1)


def shifted_qjsd(spectra, t) -> np.ndarray:
    """``J(A + tI, B + tI)`` for an array of ``t > 0``."""
    a, b, m = spectra
    t = np.asarray(t, dtype=float)[..., None]

    def h(x):
        # eta(x + t) - (x + t) log t
        return (x + t) * np.log1p(x / t)

    return np.sum(0.5 * h(a) + 0.5 * h(b) - h(m), axis=-1)


# ---------------------------------------------------------------------------
# public operations


def integrand(A, B, t: float) -> float:
    """``d_S^2(A + tI, B + tI)``; ``A``, ``B`` may be singular since ``t > 0``."""
    if not t > 0:
        raise SingularInput(f"integrand needs t > 0, got {t}")
    value = shifted_sdiv(_pair_spectra(A, B), t)
    return float(_clamp(value))


def verify_representation(A, B, cfg: QuadratureConfig = QuadratureConfig()) -> RepresentationReport:
    """Compare ``J(A, B)`` with quadrature on ``[0, T]`` plus the exact tail."""
    spectra = _pair_spectra(A, B)
    closed = float(qjsd(A, B))
    edges = graded_edges(0.0, cfg.cutoff, cfg.panels, cfg.ratio)
    quad = gauss_legendre(lambda t: shifted_sdiv(spectra, t), edges, cfg.nodes_per_panel)
    tail = float(shifted_qjsd(spectra, cfg.cutoff))
    return RepresentationReport(closed, quad, tail, abs(closed - quad - tail),
                                cfg.cutoff, cfg.panels)


def window_integral(A, B, lower: float, upper: float, panels: int = 32, nodes: int = 16) -> float:
    """``int_lower^upper d_S^2(A + tI, B + tI) dt`` for ``0 < lower < upper``."""
    if not 0 < lower < upper:
        raise ValidationError("need 0 < lower < upper")
    spectra = _pair_spectra(A, B)
    return gauss_legendre(lambda t: shifted_sdiv(spectra, t),
                          graded_edges(lower, upper, panels), nodes)


def shifted_qjsd_values(A, B, ts) -> np.ndarray:
    """``J(A + tI, B + tI)`` evaluated directly on the shifted matrices."""
    A = matcore.psd(A)
    B = matcore.psd(B)
    eye = np.eye(A.shape[0])
    ts = np.asarray(ts, dtype=float)
    As = A[None] + ts[:, None, None] * eye
    Bs = B[None] + ts[:, None, None] * eye
    return qjsd_batch(As, Bs)


def derivative_check(A, B, t: float, h: float):
    """Central difference of ``t -> J(A + tI, B + tI)`` against ``-d_S^2``.

    Returns ``(lhs, rhs)``; the finite difference is computed from the QJSD of
    the shifted matrices themselves, independently of the integrand path.
    """
    if not t > h > 0:
        raise ValidationError("derivative_check needs t > h > 0")
    up, down = shifted_qjsd_values(A, B, [t + h, t - h])
    lhs = (up - down) / (2 * h)
    rhs = -integrand(A, B, t)
    return float(lhs), rhs


def decay_exponent(A, B, ts=None) -> float:
    """Least-squares slope of ``log J(A + tI, B + tI)`` against ``log t``."""
    if ts is None:
        ts = np.geomspace(1e2, 1e4, 21)
    vals = shifted_qjsd_values(A, B, ts)
    if np.any(vals <= 0):
        raise ValidationError("J vanishes on the grid; the pair must be distinct")
    slope, _ = np.polyfit(np.log(ts), np.log(vals), 1)
    return float(slope)


def log_integral(x: float, upper: float = 1e14, panels: int = 80, nodes: int = 16) -> float:
    """``int_0^inf (1/(1+t) - 1/(x+t)) dt``, which equals ``log x`` for ``x > 0``.

    Truncated at ``upper``; the neglected tail is below ``|x - 1| / upper``.
    """
    if not x > 0:
        raise ValidationError("x must be positive")

    def f(t):
        return (x - 1.0) / ((1.0 + t) * (x + t))

    return gauss_legendre(f, graded_edges(0.0, upper, panels), nodes)
