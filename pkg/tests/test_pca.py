import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from semacc.errors import DimensionMismatch, KTooLarge
from semacc.pca import pca_fit, pca_transform


def oracle_subspace(data, k):
    """Top-k eigenvectors of the sample covariance (np.cov + scipy eigh)."""
    cov = np.cov(data, rowvar=False)
    vals, vecs = scipy.linalg.eigh(cov)
    return vals[::-1][:k], vecs[:, ::-1][:, :k]


def test_three_collinear_points():
    # covariance [[1, 0], [0, 0]] by hand: variance of {0,1,2} with n-1 divisor is 1
    model = pca_fit([[0, 0], [1, 0], [2, 0]], 1)
    np.testing.assert_allclose(model.components, [[1.0, 0.0]], atol=1e-12)
    np.testing.assert_allclose(model.explained_variance, [1.0], atol=1e-12)
    np.testing.assert_allclose(pca_transform(model, [[0, 0], [1, 0], [2, 0]])[:, 0], [-1, 0, 1], atol=1e-12)


@pytest.mark.parametrize("shape,k", [((20, 8), 3), ((6, 12), 3), ((6, 12), 6), ((30, 5), 5)])
def test_subspace_matches_covariance_oracle(shape, k):
    x = np.random.default_rng(sum(shape) + k).standard_normal(shape)
    model = pca_fit(x, k)
    vals, vecs = oracle_subspace(x, k)
    rank_k = min(k, shape[0] - 1)
    angles = scipy.linalg.subspace_angles(model.components[:rank_k].T, vecs[:, :rank_k])
    assert angles.max() < 1e-8
    np.testing.assert_allclose(model.explained_variance[:rank_k], vals[:rank_k], rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("shape,k", [((20, 8), 8), ((6, 12), 6), ((4, 4), 4)])
def test_components_orthonormal_and_sorted(shape, k):
    x = np.random.default_rng(3).standard_normal(shape)
    model = pca_fit(x, k)
    np.testing.assert_allclose(model.components @ model.components.T, np.eye(k), atol=1e-8)
    assert np.all(np.diff(model.explained_variance) <= 1e-12)


def test_sign_convention():
    x = np.random.default_rng(5).standard_normal((15, 6))
    comps = pca_fit(x, 4).components
    assert np.all(comps[np.arange(4), np.argmax(np.abs(comps), axis=1)] >= 0)


def test_full_rank_projection_preserves_distances():
    x = np.random.default_rng(9).standard_normal((12, 5))
    z = pca_transform(pca_fit(x, 5), x)
    dx = np.linalg.norm(x[:, None] - x[None], axis=-1)
    dz = np.linalg.norm(z[:, None] - z[None], axis=-1)
    np.testing.assert_allclose(dz, dx, atol=1e-9)


def test_back_projection_recovers_data():
    x = np.random.default_rng(10).standard_normal((12, 5)) * 3 + 7
    model = pca_fit(x, 5)
    back = pca_transform(model, x) @ model.components + model.mean
    np.testing.assert_allclose(back, x, atol=1e-9)


def test_mean_maps_to_origin():
    x = np.random.default_rng(11).standard_normal((10, 4))
    model = pca_fit(x, 2)
    np.testing.assert_allclose(pca_transform(model, model.mean), 0.0, atol=1e-12)


def test_explained_variance_bounded_by_total():
    x = np.random.default_rng(12).standard_normal((25, 6))
    total = np.var(x, axis=0, ddof=1).sum()
    assert pca_fit(x, 3).explained_variance.sum() <= total + 1e-12
    assert pca_fit(x, 6).explained_variance.sum() == pytest.approx(total, rel=1e-12)


def test_constant_data_gives_zero_variance():
    model = pca_fit(np.ones((5, 3)), 2)
    np.testing.assert_array_equal(model.explained_variance, [0.0, 0.0])
    np.testing.assert_allclose(model.components @ model.components.T, np.eye(2), atol=1e-12)


def test_constant_wide_data():
    model = pca_fit(np.full((3, 7), 2.5), 3)
    np.testing.assert_allclose(model.components @ model.components.T, np.eye(3), atol=1e-12)
    np.testing.assert_array_equal(model.explained_variance, 0.0)


@pytest.mark.parametrize("k", [0, 6, 9])
def test_k_too_large(k):
    with pytest.raises(KTooLarge):
        pca_fit(np.zeros((5, 8)), k)


def test_transform_dimension_mismatch():
    model = pca_fit(np.random.default_rng(0).standard_normal((5, 3)), 2)
    with pytest.raises(DimensionMismatch):
        pca_transform(model, np.zeros((2, 4)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.floats(-3, 3))
def test_transform_is_affine(seed, alpha):
    rng = np.random.default_rng(seed)
    model = pca_fit(rng.standard_normal((10, 4)), 3)
    a, b = rng.standard_normal((2, 4))
    lhs = pca_transform(model, alpha * a + (1 - alpha) * b)
    rhs = alpha * pca_transform(model, a) + (1 - alpha) * pca_transform(model, b)
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)
