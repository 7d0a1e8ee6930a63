import numpy as np
import pytest

from core.linalg import cholesky_psd, is_psd, psd_repair, random_orthonormal
from core.rng import RngStream
from core.samplers import sample_gaussian, sample_gaussian_rows, sample_laplace
from utils.errors import DimensionError, ParameterError, ShapeError


def test_same_seed_and_stream_reproduce_the_sequence():
    a = RngStream(42, 3).standard_normal(10)
    b = RngStream(42, 3).standard_normal(10)
    np.testing.assert_array_equal(a, b)


def test_named_children_are_stable_and_distinct():
    root = RngStream(9)
    np.testing.assert_array_equal(root.child("encoder").random(5), RngStream(9).child("encoder").random(5))
    assert not np.array_equal(root.child("encoder").random(5), root.child("decoder").random(5))


def test_rng_rejects_negative_seed():
    with pytest.raises(ParameterError):
        RngStream(-1)


@pytest.mark.parametrize("p,k", [(1, 1), (2, 5), (4, 4), (3, 16)])
def test_random_orthonormal_rows(p, k):
    W = random_orthonormal(p, k, RngStream(0))
    assert W.shape == (p, k)
    np.testing.assert_allclose(W @ W.T, np.eye(p), atol=1e-10)


def test_random_orthonormal_rejects_wide_projection():
    with pytest.raises(DimensionError):
        random_orthonormal(5, 3, RngStream(0))


def test_psd_repair_leaves_positive_definite_matrix_alone():
    S = np.array([[2.0, 0.5], [0.5, 1.0]])
    np.testing.assert_allclose(psd_repair(S), S)


def test_psd_repair_lifts_negative_eigenvalues():
    S = np.array([[1.0, 0.0], [0.0, -2.0]])
    repaired = psd_repair(S)
    eigenvalues = np.linalg.eigvalsh(repaired)
    assert eigenvalues.min() >= 1e-6 * max(1.0, eigenvalues.max()) - 1e-12
    assert is_psd(repaired)


def test_psd_repair_rejects_asymmetric_input():
    with pytest.raises(ShapeError):
        psd_repair(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_cholesky_of_zero_matrix_is_finite():
    L = cholesky_psd(np.zeros((3, 3)))
    assert np.all(np.isfinite(L))
    np.testing.assert_allclose(L @ L.T, np.eye(3) * 1e-6, atol=1e-12)


def test_cholesky_reconstructs_covariance():
    A = RngStream(2).standard_normal((4, 4))
    S = A @ A.T + np.eye(4)
    L = cholesky_psd(S)
    np.testing.assert_allclose(L @ L.T, S, atol=1e-10)
    assert np.allclose(L, np.tril(L))


def test_gaussian_rows_match_moments():
    mu = np.array([1.0, -2.0])
    S = np.array([[2.0, 0.6], [0.6, 1.0]])
    draws = sample_gaussian_rows(mu, cholesky_psd(S), 40000, RngStream(3))
    np.testing.assert_allclose(draws.mean(axis=0), mu, atol=0.05)
    np.testing.assert_allclose(np.cov(draws.T), S, atol=0.06)


def test_single_gaussian_draw_shape_and_mismatch():
    assert sample_gaussian(np.zeros(3), np.eye(3), RngStream(0)).shape == (3,)
    with pytest.raises(ShapeError):
        sample_gaussian(np.zeros(3), np.eye(2), RngStream(0))


@pytest.mark.parametrize("scale", [0.5, 1.0, 4608.0])
def test_laplace_moments(scale):
    draws = sample_laplace(scale, 1_000_000, RngStream(4))
    assert abs(draws.mean()) < 0.005 * scale
    assert draws.var() == pytest.approx(2 * scale ** 2, rel=0.02)
    assert np.all(np.isfinite(draws))


@pytest.mark.parametrize("scale", [0.0, -1.0, float("inf")])
def test_laplace_rejects_bad_scale(scale):
    with pytest.raises(ParameterError):
        sample_laplace(scale, 10, RngStream(0))
