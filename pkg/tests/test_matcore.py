import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qjsd import matcore
from qjsd.exceptions import DomainError, NonConvergence, ValidationError

from conftest import random_psd, random_unitary

COUNTER = np.array([[1.0, 0.25], [0.25, 0.0]])


def test_eigen_decompose_identity():
    dec = matcore.eigen_decompose(np.eye(2))
    np.testing.assert_array_equal(dec.eigenvalues, [1.0, 1.0])
    np.testing.assert_allclose(np.abs(dec.eigenvectors), np.eye(2), atol=1e-15)


def test_eigen_decompose_diagonal():
    dec = matcore.eigen_decompose(np.diag([0.0, 1.0]))
    np.testing.assert_array_equal(dec.eigenvalues, [0.0, 1.0])


def test_eigen_decompose_counterexample_matrix():
    # trace 1, determinant -1/16
    disc = math.sqrt(1 + 4 / 16)
    expected = [(1 - disc) / 2, (1 + disc) / 2]
    dec = matcore.eigen_decompose(COUNTER)
    np.testing.assert_allclose(dec.eigenvalues, expected, atol=1e-15)
    assert dec.eigenvalues[0] == pytest.approx(-0.0590170, abs=1e-7)


def test_eigen_decompose_invariants(rng):
    for dim in (1, 3, 8):
        m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        m = m + m.conj().T
        dec = matcore.eigen_decompose(m)
        assert np.all(np.diff(dec.eigenvalues) >= 0)
        assert np.linalg.norm(dec.reconstruct() - m) <= 1e-10 * max(1, np.linalg.norm(m))
        u = dec.eigenvectors
        np.testing.assert_allclose(u.conj().T @ u, np.eye(dim), atol=1e-10)
        again = matcore.eigen_decompose(m)
        assert np.array_equal(dec.eigenvalues, again.eigenvalues)
        assert np.array_equal(dec.eigenvectors, again.eigenvectors)


def test_eigen_decompose_surfaces_solver_failure(monkeypatch):
    def boom(_):
        raise np.linalg.LinAlgError("did not converge")

    monkeypatch.setattr(np.linalg, "eigh", boom)
    with pytest.raises(NonConvergence):
        matcore.eigen_decompose(np.eye(2))


@pytest.mark.parametrize(
    "m, expected",
    [
        (np.diag([0.5, 0.5]), -math.log(2)),
        (np.diag([1.0, 0.0]), 0.0),
        (np.diag([0.75, 0.25]), 0.75 * math.log(0.75) + 0.25 * math.log(0.25)),
    ],
)
def test_trace_fn_eta(m, expected):
    assert matcore.trace_fn(m, matcore.eta) == pytest.approx(expected, abs=1e-15)


def test_trace_fn_eta_value():
    assert matcore.trace_fn(np.diag([0.75, 0.25]), matcore.eta) == pytest.approx(-0.5623351, abs=1e-7)


def test_trace_fn_domain_error():
    with pytest.raises(DomainError):
        matcore.trace_fn(np.diag([1.0, 0.0]), np.log)


def test_matrix_fn_examples():
    np.testing.assert_allclose(matcore.matrix_fn(np.eye(3), lambda x: x**2), np.eye(3), atol=1e-15)
    np.testing.assert_allclose(matcore.matrix_fn(np.diag([4.0, 9.0]), np.sqrt), np.diag([2.0, 3.0]), atol=1e-14)
    ln2 = math.log(2)
    np.testing.assert_allclose(matcore.matrix_fn(np.eye(2) / 2, np.log), -ln2 * np.eye(2), atol=1e-15)


def test_matrix_fn_trace_matches_trace_fn(rng):
    a = random_psd(rng, 5, rank=3)
    f = matcore.eta
    assert np.trace(matcore.matrix_fn(a, f)).real == pytest.approx(matcore.trace_fn(a, f), abs=1e-10)


def test_is_psd_examples():
    assert matcore.is_psd(np.eye(2), 0.0)
    assert not matcore.is_psd(COUNTER, 1e-10)
    assert matcore.is_psd(np.diag([0.0, 1.0]), 1e-10)


def test_hermitian_validation():
    with pytest.raises(ValidationError):
        matcore.hermitian(np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValidationError):
        matcore.hermitian(np.zeros((2, 3)))
    with pytest.raises(ValidationError):
        matcore.hermitian(np.array([[np.nan]]))
    # near-Hermitian input is symmetrized exactly
    m = np.array([[1, 1e-14j], [0, 2]])
    h = matcore.hermitian(m)
    assert np.array_equal(h, h.conj().T)


def test_psd_clamps_tiny_negatives_and_rejects_larger_ones():
    u = random_unitary(np.random.default_rng(3), 2)
    tiny = u @ np.diag([-1e-11, 1.0]) @ u.conj().T
    clamped = matcore.psd(tiny)
    assert np.linalg.eigvalsh(clamped)[0] >= -1e-15
    with pytest.raises(ValidationError):
        matcore.psd(u @ np.diag([-1e-9, 1.0]) @ u.conj().T)


def test_density_requires_unit_trace():
    matcore.density(np.eye(2) / 2)
    with pytest.raises(ValidationError):
        matcore.density(np.eye(2))


seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=1, max_value=8)


@settings(max_examples=50, deadline=None)
@given(seeds, dims)
def test_unitary_covariance(seed, dim):
    rng = np.random.default_rng(seed)
    m = random_psd(rng, dim) - 0.5 * np.eye(dim)
    u = random_unitary(rng, dim)
    w1 = matcore.eigen_decompose(m).eigenvalues
    w2 = matcore.eigen_decompose(u @ m @ u.conj().T).eigenvalues
    np.testing.assert_allclose(w1, w2, atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(seeds, dims)
def test_trace_fn_identity_function_is_trace(seed, dim):
    m = random_psd(np.random.default_rng(seed), dim)
    assert matcore.trace_fn(m, lambda x: x) == pytest.approx(np.trace(m).real, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(seeds, dims)
def test_sqrt_then_square_reconstructs(seed, dim):
    m = random_psd(np.random.default_rng(seed), dim)
    back = matcore.matrix_fn(matcore.matrix_fn(m, np.sqrt), lambda x: x * x)
    np.testing.assert_allclose(back, m, atol=1e-8)


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(min_value=2, max_value=8))
def test_eta_finite_on_singular_matrices(seed, dim):
    rng = np.random.default_rng(seed)
    m = random_psd(rng, dim, rank=int(rng.integers(1, dim)))
    assert math.isfinite(matcore.trace_fn(m, matcore.eta))
