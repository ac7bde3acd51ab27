"""Best-effort search for kernels that fail to be negative definite.

Two modes:

``neglog-cone``
    Jensen divergence of ``-log`` on 2x2 positive definite matrices. This
    kernel is known not to embed in Hilbert space, but no explicit witness
    configuration is available; the search tries to find one.
``qjsd-n3``
    The QJSD on ``n x n`` density matrices (``n = 3`` by default), where
    Hilbert-space embeddability is an open question.

Each restart draws a random point set and runs a randomized coordinate
ascent on the largest eigenvalue of the kernel on zero-sum vectors, relative
to the spectrum's spread. A point set whose kernel check reports a
violation is a witness. Restarts are seeded from
``(seed, restart)`` and every record carries the full point set, so results
are reproducible and re-checkable. Absence of a witness proves nothing.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterator

import numpy as np

from .exceptions import ValidationError
from .formats import matrix_record, matrix_from_record
from .harness import ginibre
from .qubit import PairSpectra, centered_kernel_check

MODES = ("neglog-cone", "qjsd-n3")
_PATIENCE = 25


@dataclass
class Candidate:
    mode: str
    seed: int
    restart: int
    evaluations: int
    objective: float
    witness: bool
    points: list

    def to_dict(self):
        return asdict(self)


def _function(mode):
    return "neglog" if mode == "neglog-cone" else "eta"


def _report(mode, states):
    return centered_kernel_check(PairSpectra.of(np.asarray(states)).kernel(_function(mode)))


def objective(mode: str, states) -> float:
    """Largest zero-sum eigenvalue of ``1/2 D`` divided by the largest magnitude.

    Scale free, in ``[-1, 1]``; collapsed point sets score ``-1`` so the
    search cannot drift into round-off territory.
    """
    report = _report(mode, states)
    spread = float(np.max(np.abs(report.centered_spectrum)))
    if spread < 1e-8:
        return -1.0
    return report.max_centered_eigenvalue / spread


def is_witness(mode: str, states) -> bool:
    return not _report(mode, states).negative_definite


def _state(mode, factor):
    a = factor @ factor.conj().T
    if mode == "neglog-cone":
        # J_{-log} is scale invariant, so det = 1 loses nothing and keeps the search bounded
        return a / np.sqrt(np.linalg.det(a).real)
    return a / np.trace(a).real


def _valid_factor(mode, factor):
    return mode != "neglog-cone" or abs(np.linalg.det(factor)) > 1e-6


def replay_candidate(record: dict) -> float:
    """Recompute the objective of a record from its stored point set."""
    states = np.stack([matrix_from_record(p) for p in record["points"]])
    return objective(record["mode"], states)


def explore(mode: str, seed: int, budget: int, dim: int = 3,
            max_points: int = 8) -> Iterator[Candidate]:
    """Yield one :class:`Candidate` per restart until ``budget`` objective
    evaluations have been spent."""
    if mode not in MODES:
        raise ValidationError(f"unknown exploration mode {mode!r}")
    if budget < 1:
        raise ValidationError("budget must be positive")
    n = 2 if mode == "neglog-cone" else dim
    spent = 0
    restart = 0
    while spent < budget:
        rng = np.random.default_rng([seed, 99, restart])
        m = int(rng.integers(3, max_points + 1))
        factors = [ginibre(rng, n, n) for _ in range(m)]
        states = np.stack([_state(mode, g) for g in factors])
        best = objective(mode, states)
        spent += 1
        used = 1
        step, stale, it = 0.3, 0, 0
        while spent < budget and stale < _PATIENCE:
            j = it % m
            it += 1
            trial = factors[j] + step * ginibre(rng, n, n)
            if not _valid_factor(mode, trial):
                stale += 1
                continue
            proposal = states.copy()
            proposal[j] = _state(mode, trial)
            value = objective(mode, proposal)
            spent += 1
            used += 1
            if value > best:
                best, states, factors[j] = value, proposal, trial
                step *= 1.5
                stale = 0
            else:
                step = max(step * 0.8, 1e-4)
                stale += 1
        yield Candidate(
            mode=mode, seed=seed, restart=restart, evaluations=used, objective=float(best),
            witness=is_witness(mode, states), points=[matrix_record(s) for s in states],
        )
        restart += 1
