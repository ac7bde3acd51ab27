"""Seeded random inputs and randomized property suites.

Every trial draws from its own generator seeded by ``(seed, stream, trial)``,
so a trial can be regenerated from its index alone and splitting the trials
across workers never changes the result. Suites report the worst margin
(smallest slack of the tested inequality) even when nothing is violated.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import matcore
from .divergences import _clamp, qjsd_from_spectra, sdiv_from_spectra
from .exceptions import ValidationError

VIOLATION_TOL = 1e-12
CONVEXITY_LAMBDAS = (0.25, 0.5, 0.9)
CHUNK = 20000

# stream tags keep the suites' random inputs independent under a shared seed
_STREAMS = {"psd": 1, "density": 2, "bloch": 3, "qjsd": 10, "sdiv": 11, "monotone": 12, "convex": 13}


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    dim: int = 2
    rank: Optional[int] = None
    count: int = 1

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        if self.dim < 1:
            raise ValidationError("dim must be positive")
        if self.count < 1:
            raise ValidationError("count must be positive")
        if self.rank is not None and not 1 <= self.rank <= self.dim:
            raise ValidationError(f"rank must lie in [1, {self.dim}]")


@dataclass
class SuiteReport:
    name: str
    seed: int
    dim: int
    rank: Optional[int]
    trials: int
    violations: int
    worst_margin: float
    worst_trial: int
    tolerance: float = VIOLATION_TOL
    elapsed: float = 0.0
    records: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)


def trial_rng(seed: int, stream: str, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, _STREAMS[stream], index])


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("QJSD_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# samplers


def ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """Standard complex Gaussian matrix (``E|z|^2 = 1``)."""
    z = rng.standard_normal((rows, cols, 2))
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2)


def random_psd(rng, dim, rank=None) -> np.ndarray:
    g = ginibre(rng, dim, dim if rank is None else rank)
    return g @ g.conj().T


def random_density(rng, dim, rank=None) -> np.ndarray:
    a = random_psd(rng, dim, rank)
    return a / np.trace(a).real


def random_unitary(rng, dim) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    q, r = np.linalg.qr(ginibre(rng, dim, dim))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_kraus(rng, dim_in, dim_out=None, n_ops=None) -> np.ndarray:
    """Kraus operators ``(k, dim_out, dim_in)`` cut from a Haar isometry."""
    dim_out = dim_in if dim_out is None else dim_out
    fewest = -(-dim_in // dim_out)
    k = int(rng.integers(fewest, dim_in * dim_out + 1)) if n_ops is None else n_ops
    if k < fewest:
        raise ValidationError(f"need at least {fewest} Kraus operators for {dim_in} -> {dim_out}")
    q, r = np.linalg.qr(ginibre(rng, k * dim_out, dim_in))
    d = np.diag(r)
    iso = q * (d / np.abs(d))
    return iso.reshape(k, dim_out, dim_in)


def apply_kraus(kraus, rho) -> np.ndarray:
    out = np.einsum("kij,...jl,kml->...im", kraus, rho, kraus.conj())
    return (out + np.swapaxes(out, -1, -2).conj()) / 2


def partial_trace(rho, dims, keep: int = 0) -> np.ndarray:
    """Partial trace of a bipartite ``dims = (d0, d1)`` operator, keeping one factor."""
    d0, d1 = dims
    r = np.asarray(rho).reshape(*rho.shape[:-2], d0, d1, d0, d1)
    if keep == 0:
        return np.einsum("...ajbj->...ab", r)
    return np.einsum("...jajb->...ab", r)


def sample_psd(cfg: SamplerConfig) -> list:
    """``G G^H`` with ``G`` a ``dim x rank`` complex Ginibre matrix, one per sample."""
    return [random_psd(trial_rng(cfg.seed, "psd", i), cfg.dim, cfg.rank) for i in range(cfg.count)]


def sample_density(cfg: SamplerConfig) -> list:
    return [random_density(trial_rng(cfg.seed, "density", i), cfg.dim, cfg.rank)
            for i in range(cfg.count)]


def sample_bloch(cfg: SamplerConfig) -> list:
    """Uniform points of the closed unit ball by rejection from the cube."""
    out = []
    for i in range(cfg.count):
        rng = trial_rng(cfg.seed, "bloch", i)
        while True:
            r = rng.uniform(-1.0, 1.0, 3)
            if r @ r <= 1.0:
                out.append(r)
                break
    return out


# ---------------------------------------------------------------------------
# per-trial inputs


def _cone_point(rng, dim, rank):
    # random rank unless fixed, log-normal overall scale
    k = int(rng.integers(1, dim + 1)) if rank is None else rank
    return random_psd(rng, dim, k) * np.exp(rng.normal())


def _pd_point(rng, dim):
    while True:
        a = random_psd(rng, dim) * np.exp(rng.normal())
        if matcore.eigvalsh(a)[0] > matcore.ZERO_EIG:
            return a


def _state(rng, dim, rank):
    k = int(rng.integers(1, dim + 1)) if rank is None else rank
    return random_density(rng, dim, k)


def _metric_inputs(suite, cfg, trial):
    rng = trial_rng(cfg.seed, suite, trial)
    if suite == "sdiv":
        return [_pd_point(rng, cfg.dim) for _ in range(3)]
    return [_cone_point(rng, cfg.dim, cfg.rank) for _ in range(3)]


def _monotone_inputs(cfg, trial):
    """``(rho, sigma, image_rho, image_sigma)``; even trials use a random
    Kraus channel, odd trials trace out an ancillary qubit."""
    rng = trial_rng(cfg.seed, "monotone", trial)
    if trial % 2 == 0:
        rho, sigma = _state(rng, cfg.dim, cfg.rank), _state(rng, cfg.dim, cfg.rank)
        kraus = random_kraus(rng, cfg.dim)
        return rho, sigma, apply_kraus(kraus, rho), apply_kraus(kraus, sigma)
    big = 2 * cfg.dim
    rho, sigma = _state(rng, big, None), _state(rng, big, None)
    dims = (cfg.dim, 2)
    return rho, sigma, partial_trace(rho, dims), partial_trace(sigma, dims)


def _convex_inputs(cfg, trial):
    rng = trial_rng(cfg.seed, "convex", trial)
    mats = [_state(rng, cfg.dim, cfg.rank) for _ in range(4)]
    return mats, CONVEXITY_LAMBDAS[trial % len(CONVEXITY_LAMBDAS)]


# ---------------------------------------------------------------------------
# margins (vectorized over trials)


def _qjsd(a, b):
    value, scale = qjsd_from_spectra(matcore.psd_spectrum(a), matcore.psd_spectrum(b),
                                     matcore.psd_spectrum((a + b) / 2))
    return _clamp(value, scale)


def _sdiv(a, b):
    value, scale = sdiv_from_spectra(matcore.eigvalsh(a), matcore.eigvalsh(b),
                                     matcore.eigvalsh((a + b) / 2))
    return _clamp(value, scale)


def _triangle_margins(dist, A, B, C):
    ab, bc, ac = np.sqrt(dist(A, B)), np.sqrt(dist(B, C)), np.sqrt(dist(A, C))
    return np.minimum.reduce([ab + bc - ac, ab + ac - bc, ac + bc - ab])


def _margins(suite, cfg, trials):
    if suite in ("qjsd", "sdiv"):
        triples = [_metric_inputs(suite, cfg, i) for i in trials]
        A, B, C = (np.stack(x) for x in zip(*triples))
        return _triangle_margins(_qjsd if suite == "qjsd" else _sdiv, A, B, C)
    if suite == "monotone":
        trials = list(trials)
        out = np.empty(len(trials))
        # input sizes differ between the two channel families
        for parity in (0, 1):
            idx = [j for j, i in enumerate(trials) if i % 2 == parity]
            if not idx:
                continue
            rho, sigma, prho, psigma = (
                np.stack(x) for x in zip(*(_monotone_inputs(cfg, trials[j]) for j in idx)))
            out[idx] = _qjsd(rho, sigma) - _qjsd(prho, psigma)
        return out
    if suite == "convex":
        inputs = [_convex_inputs(cfg, i) for i in trials]
        r1, r2, s1, s2 = (np.stack(x) for x in zip(*(m for m, _ in inputs)))
        lam = np.array([l for _, l in inputs])[:, None, None]
        mixed = _qjsd(lam * r1 + (1 - lam) * r2, lam * s1 + (1 - lam) * s2)
        lam = lam[:, 0, 0]
        return lam * _qjsd(r1, s1) + (1 - lam) * _qjsd(r2, s2) - mixed
    raise ValidationError(f"unknown suite {suite!r}")


def trial_margin(suite: str, cfg: SamplerConfig, trial: int) -> float:
    """Recompute the margin of a single trial from its index."""
    return float(_margins(suite, cfg, [trial])[0])


def replay(record: dict) -> float:
    """Recompute the margin stored in a violation record."""
    cfg = SamplerConfig(seed=record["seed"], dim=record["dim"], rank=record.get("rank"),
                        count=record["trial"] + 1)
    return trial_margin(record["suite"], cfg, record["trial"])


def run_suite(suite: str, cfg: SamplerConfig, workers: Optional[int] = None,
              name: Optional[str] = None) -> SuiteReport:
    """Run ``cfg.count`` trials of a suite and summarize the margins."""
    start = time.perf_counter()
    workers = default_workers() if workers is None else max(1, workers)
    chunks = [range(lo, min(lo + CHUNK, cfg.count)) for lo in range(0, cfg.count, CHUNK)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda c: _margins(suite, cfg, c), chunks))
    else:
        parts = [_margins(suite, cfg, c) for c in chunks]
    margins = np.concatenate(parts)
    bad = np.flatnonzero(margins < -VIOLATION_TOL)
    worst = int(np.argmin(margins))
    records = [dict(suite=suite, seed=cfg.seed, dim=cfg.dim, rank=cfg.rank, trial=int(i),
                    margin=float(margins[i])) for i in bad]
    return SuiteReport(
        name=name or suite, seed=cfg.seed, dim=cfg.dim, rank=cfg.rank, trials=cfg.count,
        violations=len(records), worst_margin=float(margins[worst]), worst_trial=worst,
        elapsed=time.perf_counter() - start, records=records,
    )


def run_metric_suite(cfg: SamplerConfig, which: str = "qjsd", workers=None) -> SuiteReport:
    """Triangle inequality for ``sqrt(J)`` (``qjsd``) or ``d_S`` (``sdiv``)."""
    if which not in ("qjsd", "sdiv"):
        raise ValidationError("which must be 'qjsd' or 'sdiv'")
    return run_suite(which, cfg, workers, name=f"metric-{which}")


def run_monotonicity_suite(cfg: SamplerConfig, workers=None) -> SuiteReport:
    """``J(Phi rho, Phi sigma) <= J(rho, sigma)`` for random channels."""
    return run_suite("monotone", cfg, workers, name="monotonicity")


def run_convexity_suite(cfg: SamplerConfig, workers=None) -> SuiteReport:
    """Joint convexity of ``J`` on random convex combinations of state pairs."""
    return run_suite("convex", cfg, workers, name="joint-convexity")
