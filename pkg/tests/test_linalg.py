"""Tests for the numerical kernels in csbm.linalg"""

import numpy as np
import pytest
from scipy import sparse

from csbm import linalg, metrics, models, utils


def random_symmetric(n, rng, density=.3):
    M = sparse.random(n, n, density=density, random_state=rng).toarray()
    return M + M.T


def test_make_rng_reproducible():
    a = linalg.make_rng(3, 'data', 1).random(5)
    b = linalg.make_rng(3, 'data', 1).random(5)
    c = linalg.make_rng(3, 'init', 1).random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_make_rng_passthrough():
    rng = np.random.default_rng(0)
    assert linalg.make_rng(rng) is rng


def test_make_rng_invalid_seed():
    with pytest.raises(ValueError):
        linalg.make_rng(-1)


def test_seed_int_stable():
    assert linalg.seed_int(0, 'kmeans', 2) == linalg.seed_int(0, 'kmeans', 2)
    assert linalg.seed_int(0, 'kmeans', 2) != linalg.seed_int(0, 'kmeans', 3)


def test_sample_degenerate():
    rng = linalg.make_rng(0)
    assert np.all(linalg.sample(linalg.Bernoulli(0.), rng, size=100) == 0)
    assert np.all(linalg.sample(linalg.Bernoulli(1.), rng, size=100) == 1)
    assert linalg.sample(linalg.Gaussian(2.5, 0.), rng) == 2.5
    draws = linalg.sample(linalg.Multinomial((0., 1., 0.)), rng, size=50)
    assert np.all(draws == 1)


def test_sample_bernoulli_mean():
    draws = linalg.sample(linalg.Bernoulli(.3), linalg.make_rng(0), size=100000)
    assert abs(draws.mean() - .3) <= .01


def test_sample_gaussian_variance():
    draws = linalg.sample(linalg.Gaussian(1., 2.), linalg.make_rng(0), size=10000)
    assert abs(draws.var() - 4.) <= .05 * 4.


@pytest.mark.parametrize('dist', [lambda: linalg.Bernoulli(1.5),
                                  lambda: linalg.Gaussian(0., -1.),
                                  lambda: linalg.Multinomial((.5, .6))])
def test_invalid_distributions(dist):
    with pytest.raises(ValueError):
        dist()


def test_spmv_examples():
    A = utils.from_triplets(2, [(0, 1, 1.)])
    assert np.array_equal(linalg.spmv(A, [1., 0.]), [0., 1.])
    D = utils.from_triplets(1, [(0, 0, 2.)])
    assert np.array_equal(linalg.spmv(D, [3.]), [6.])


def test_spmv_dense_oracle():
    rng = np.random.default_rng(0)
    M = random_symmetric(6, rng)
    v = rng.standard_normal(6)
    assert np.allclose(linalg.spmv(sparse.csr_matrix(M), v), M @ v)
    with pytest.raises(ValueError):
        linalg.spmv(sparse.csr_matrix(M), np.ones(5))


def test_eigs_diagonal():
    res = linalg.eigs_topk_abs(sparse.diags([3., -5., 1.]), 3)
    assert np.allclose(res.eigenvalues, [-5., 3., 1.])
    assert res.success


def test_eigs_result_fields_are_arrays():
    for A in (sparse.diags([3., -5., 1.]), sparse.csr_matrix((3, 3))):
        res = linalg.eigs_topk_abs(A, 2)
        assert isinstance(res.eigenvalues, np.ndarray)
        assert isinstance(res.eigenvectors, np.ndarray)
        assert res.eigenvectors.shape == (3, 2)


def test_eigs_algebraic_order():
    res = linalg.eigs_topk(sparse.diags([3., -5., 1.]), 2, which='algebraic')
    assert np.allclose(res.eigenvalues, [3., 1.])


def test_eigs_expected_matrix():
    P = models.expected_matrix(np.array([0, 0, 1, 1]), np.diag([.5, .5]))
    res = linalg.eigs_topk_abs(P, 2)
    assert np.allclose(res.eigenvalues, [1., 1.])


def test_eigs_empty_matrix():
    res = linalg.eigs_topk_abs(sparse.csr_matrix((4, 4)), 2)
    assert np.array_equal(res.eigenvalues, np.zeros(2))
    assert np.array_equal(res.eigenvectors, np.eye(4)[:, :2])


def test_eigs_sign_convention():
    rng = np.random.default_rng(1)
    res = linalg.eigs_topk_abs(sparse.csr_matrix(random_symmetric(10, rng)), 3)
    idx = np.argmax(np.abs(res.eigenvectors), axis=0)
    assert np.all(res.eigenvectors[idx, np.arange(3)] > 0)


def test_eigs_dense_oracle():
    rng = np.random.default_rng(2)
    for _ in range(50):
        n = int(rng.integers(5, 51))
        K = int(rng.integers(1, min(n, 6)))
        M = rng.standard_normal((n, n))
        M = M + M.T
        res = linalg.eigs_topk_abs(sparse.csr_matrix(M), K)
        values, vectors = np.linalg.eigh(M)
        idx = np.argsort(-np.abs(values), kind='stable')[:K]
        assert np.allclose(res.eigenvalues, values[idx], atol=1e-6)
        # Gaussian matrices have simple spectra, vectors agree up to sign
        overlap = np.abs(np.sum(res.eigenvectors * vectors[:, idx], axis=0))
        assert np.allclose(overlap, 1., atol=1e-6)


def test_eigs_lanczos_path():
    n = linalg.DENSE_MAX_N + 88
    z = np.repeat(np.arange(3), n // 3)
    A = models.generate_sbm(z, models.symmetric_pi(3, .3, .02), rng=0)
    res = linalg.eigs_topk_abs(A, 3, seed=0)
    assert res.nit > 0
    assert np.all(res.residuals <= 1e-6 * abs(res.eigenvalues[0]))
    dense = np.linalg.eigvalsh(A.toarray())
    top = dense[np.argsort(-np.abs(dense))[:3]]
    assert np.allclose(res.eigenvalues, top, atol=1e-6)


def test_eigs_invalid_k():
    with pytest.raises(ValueError):
        linalg.eigs_topk_abs(sparse.eye(3), 4)


def test_kmeans_two_points():
    labels = linalg.kmeans(np.array([0., 10.]), 2)
    assert labels[0] != labels[1]


def test_kmeans_separated():
    data = np.array([[0., 0.], [0., .1], [5., 5.], [5., 5.1]])
    labels = linalg.kmeans(data, 2)
    assert labels[0] == labels[1]
    assert labels[2] == labels[3]
    assert labels[0] != labels[2]


def test_kmeans_gaussians():
    rng = np.random.default_rng(0)
    centers = np.array([[0., 0.], [10., 0.], [0., 10.]])
    truth = np.repeat(np.arange(3), 10)
    data = centers[truth] + .5 * rng.standard_normal((30, 2))
    labels = linalg.kmeans(data, 3, seed=4)
    assert metrics.misclustering_rate(labels, truth) == 0.


def test_kmeans_deterministic():
    data = np.random.default_rng(0).standard_normal((50, 2))
    assert np.array_equal(linalg.kmeans(data, 4, seed=1), linalg.kmeans(data, 4, seed=1))


def test_kmeans_degenerate():
    with pytest.raises(linalg.DegenerateClusteringError):
        linalg.kmeans(np.zeros((5, 2)), 2)
    with pytest.raises(ValueError):
        linalg.kmeans(np.zeros((1, 2)), 2)


def test_lloyd_inertia_non_increasing():
    data = np.random.default_rng(3).standard_normal((100, 2))
    res = linalg.lloyd(data, data[:4])
    assert np.all(np.diff(res.history) <= 1e-12)
