import numpy as np
import pytest

_ACCEPTANCE = []


def random_psd(rng, dim, rank=None, scale=1.0):
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    return scale * (g @ g.conj().T) / dim


def random_density(rng, dim, rank=None):
    a = random_psd(rng, dim, rank)
    return a / np.trace(a).real


def random_unitary(rng, dim):
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def criterion():
    """Record one acceptance criterion and fail the test if it did not pass."""

    def record(number, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}"
        if detail:
            line += f" ({detail})"
        _ACCEPTANCE.append((number, line))
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE, key=lambda x: x[0]):
            terminalreporter.write_line(line)
