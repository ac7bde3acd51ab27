import math

import numpy as np
import pytest

from qjsd import divergences as dv
from qjsd import qubit
from qjsd.exceptions import AsymmetricInput, DimensionMismatch, NotEmbeddable, ValidationError
from qjsd.harness import SamplerConfig, sample_bloch

LN2 = math.log(2)


def ball(rng, m):
    r = rng.normal(size=(m, 3))
    r /= np.linalg.norm(r, axis=1, keepdims=True)
    return r * rng.random((m, 1)) ** (1 / 3)


@pytest.mark.parametrize(
    "r, rho",
    [
        ((0, 0, 0), np.eye(2) / 2),
        ((0, 0, 1), np.diag([1.0, 0.0])),
        ((1, 0, 0), np.full((2, 2), 0.5)),
    ],
)
def test_bloch_examples(r, rho):
    np.testing.assert_allclose(qubit.bloch_to_density(r), rho, atol=1e-16)
    np.testing.assert_allclose(qubit.density_to_bloch(rho), r, atol=1e-16)


def test_bloch_round_trip(rng):
    for r in ball(rng, 10_000):
        rho = qubit.bloch_to_density(r)
        np.testing.assert_allclose(qubit.density_to_bloch(rho), r, atol=1e-12)
        np.testing.assert_allclose(qubit.bloch_to_density(qubit.density_to_bloch(rho)), rho, atol=1e-12)


def test_bloch_density_spectrum(rng):
    for r in ball(rng, 100):
        s = np.linalg.norm(r)
        np.testing.assert_allclose(np.linalg.eigvalsh(qubit.bloch_to_density(r)),
                                   [(1 - s) / 2, (1 + s) / 2], atol=1e-15)


def test_bloch_validation():
    with pytest.raises(ValidationError):
        qubit.bloch_to_density((1.0, 0.1, 0.0))
    with pytest.raises(DimensionMismatch):
        qubit.density_to_bloch(np.eye(3) / 3)


def test_mid_eigenvalues_examples():
    assert qubit.mid_eigenvalues((0, 0, 1), (0, 0, -1)) == (0.5, 0.5)
    assert qubit.mid_eigenvalues((0, 0, 1), (0, 0, 1)) == (0.0, 1.0)
    low, high = qubit.mid_eigenvalues((0, 0, 1), (1, 0, 0))
    assert low == pytest.approx((1 - math.sqrt(2) / 2) / 2, abs=1e-15)
    assert (low, high) == pytest.approx((0.1464466, 0.8535534), abs=1e-7)


def test_mid_eigenvalues_match_eigensolver(rng):
    pts = ball(rng, 20_000).reshape(10_000, 2, 3)
    for rj, rk in pts:
        mid = (qubit.bloch_to_density(rj) + qubit.bloch_to_density(rk)) / 2
        np.testing.assert_allclose(qubit.mid_eigenvalues(rj, rk), np.linalg.eigvalsh(mid), atol=1e-12)


def test_ft_kernel_identical_points():
    pts = np.array([[0.1, 0.2, 0.3]] * 2)
    np.testing.assert_array_equal(qubit.ft_kernel(pts, 1.0), np.zeros((2, 2)))


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_ft_closed_form_matches_spectral_path(rng, t):
    pts = ball(rng, 15)
    closed = qubit.ft_kernel(pts, t)
    generic = qubit.jensen_kernel(pts, dv.f_t(t))
    np.testing.assert_allclose(closed, generic, atol=1e-12)
    rho = [qubit.bloch_to_density(r) for r in pts[:3]]
    assert closed[0, 2] == pytest.approx(dv.jensen_f_divergence(dv.f_t(t), rho[0], rho[2]), abs=1e-12)
    report = qubit.ft_kernel_matrix(pts, t)
    assert report.negative_definite


def test_two_point_quadratic_form(rng):
    pts = ball(rng, 2)
    k = qubit.ft_kernel(pts, 1.0)
    c = np.array([1.0, -1.0])
    assert c @ k @ c == pytest.approx(-2 * k[0, 1], abs=1e-15)
    assert c @ k @ c <= 0


def test_centered_check_random_qubits_with_zero_sum_oracle(rng):
    pts = ball(rng, 10)
    report = qubit.kernel_check(pts, "eta")
    assert report.negative_definite
    assert report.centered_spectrum.shape == (10,)
    # independent oracle: the quadratic form over random zero-sum vectors
    c = rng.normal(size=(5000, 10))
    c -= c.mean(axis=1, keepdims=True)
    forms = np.einsum("ij,jk,ik->i", c, report.kernel, c)
    assert forms.max() <= 1e-12


def test_centered_check_two_points():
    report = qubit.centered_kernel_check([[0.0, 0.3], [0.3, 0.0]])
    assert report.negative_definite
    # unit zero-sum vector (1, -1)/sqrt(2): 1/2 c^T D c = -0.3 / 2
    assert report.max_centered_eigenvalue == pytest.approx(-0.15, abs=1e-15)


def test_centered_check_detects_violation():
    # squared distances of a non-metric configuration
    d = np.array([[0, 1, 4], [1, 0, 1], [4, 1, 0]], dtype=float) ** 2
    report = qubit.centered_kernel_check(d)
    assert not report.negative_definite
    with pytest.raises(NotEmbeddable):
        qubit.mds_embed(report)


def test_centered_check_input_validation():
    with pytest.raises(AsymmetricInput):
        qubit.centered_kernel_check([[0.0, 1.0], [2.0, 0.0]])
    with pytest.raises(AsymmetricInput):
        qubit.centered_kernel_check([[1.0, 1.0], [1.0, 0.0]])


def test_neglog_cone_kernel_runs(rng):
    mats = []
    for _ in range(6):
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        mats.append(g @ g.conj().T + 0.1 * np.eye(2))
    report = qubit.kernel_check(np.stack(mats), "neglog")
    assert report.kernel.shape == (6, 6)
    assert report.verdict in (qubit.Verdict.NEGATIVE_DEFINITE, qubit.Verdict.VIOLATED)


def test_mds_two_orthogonal_states():
    report = qubit.kernel_check(np.array([[0, 0, 1.0], [0, 0, -1.0]]), "eta")
    emb = qubit.mds_embed(report)
    assert emb.dim == 1
    dist = abs(emb.coordinates[0, 0] - emb.coordinates[1, 0])
    assert dist == pytest.approx(math.sqrt(LN2), abs=1e-12)


def test_mds_identical_points():
    report = qubit.kernel_check(np.array([[0.2, 0.1, 0.0]] * 4), "eta")
    emb = qubit.mds_embed(report)
    np.testing.assert_array_equal(emb.coordinates, 0.0)
    assert emb.residual == 0.0


def test_mds_reproduces_qjsd_distances(rng):
    pts = ball(rng, 10)
    emb = qubit.mds_embed(qubit.kernel_check(pts, "eta"))
    assert emb.residual <= 1e-8
    dist = np.sqrt(emb.squared_distances())
    states = [qubit.bloch_to_density(r) for r in pts]
    for j in range(10):
        for k in range(10):
            assert dist[j, k] == pytest.approx(dv.qjsd_distance(states[j], states[k]), abs=1e-8)


def test_cls_pd_kernel_examples():
    r = np.array([[0.3, -0.2, 0.5]])
    t = 0.7
    expected = 1 / (1 - np.sum((2 * r[0] / (4 * t + 2)) ** 2))
    assert qubit.cls_pd_kernel_check(r, t) == pytest.approx(expected, rel=1e-15)
    origin = np.zeros((5, 3))
    assert qubit.cls_pd_kernel_check(origin, 1.0) == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(np.linalg.eigvalsh(np.ones((5, 5))), [0, 0, 0, 0, 5], atol=1e-12)


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_cls_pd_kernel_random_sets(t):
    for seed in range(20):
        pts = np.array(sample_bloch(SamplerConfig(seed=seed, count=15)))
        assert qubit.cls_pd_kernel_check(pts, t) >= -1e-10


def test_counterexample_fixture():
    mat, (high, low) = qubit.briet_harremoes_counterexample()
    np.testing.assert_array_equal(mat, [[1.0, 0.25], [0.25, 0.0]])
    disc = math.sqrt(1 + 4 / 16)
    assert high == pytest.approx((1 + disc) / 2, abs=1e-15)
    assert low == pytest.approx((1 - disc) / 2, abs=1e-15)
    assert (high, low) == pytest.approx((1.0590170, -0.0590170), abs=1e-7)
    rho = np.diag([1.0, 0.0])
    assert 2 * np.trace(rho @ rho) - 1 == 1.0
