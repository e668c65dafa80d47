"""Tests for the initialization and baseline clusterers"""

import numpy as np
import pytest
from scipy import sparse

from csbm import init, linalg, metrics, models, utils


def two_cliques(size=5):
    block = np.ones((size, size)) - np.eye(size)
    return sparse.csr_matrix(np.kron(np.eye(2), block))


def fig1_instance(n=300, seed=0):
    Pi = 0.02 * np.array([[1.6, 1.2, .05], [1.2, 1.6, .05], [.05, .05, 1.2]])
    centers = np.array([[0., 0., 1.], [-1., 1., 0.], [0., 0., 1.]])
    rng = linalg.make_rng(seed)
    z = np.repeat(np.arange(3), n // 3)
    A = models.generate_sbm(z, Pi, rng=rng)
    X = models.generate_covariates(z, models.CovariateSpec(centers, np.sqrt(.2)), rng)
    return A, X, z


def test_gmm_threshold():
    rng = np.random.default_rng(0)
    data = np.concatenate([rng.standard_normal(50), 100 + rng.standard_normal(50)])
    labels, model = init.gmm_em(data, 2, seed=0)
    assert np.all(labels[:50] == labels[0])
    assert np.all(labels[50:] != labels[0])
    assert np.all(np.diff(model.history) >= -1e-8 * np.abs(model.history[:-1]))


@pytest.mark.parametrize('covariance_model', ['spherical', 'diagonal'])
def test_gmm_single_component(covariance_model):
    data = np.random.default_rng(1).standard_normal((40, 2)) * [1., 3.]
    labels, model = init.gmm_em(data, 1, covariance_model=covariance_model)
    assert np.all(labels == 0)
    assert np.allclose(model.means[0], data.mean(axis=0))
    if covariance_model == 'spherical':
        assert np.isclose(model.variances[0], data.var(axis=0).mean())
    else:
        assert np.allclose(model.variances[0], data.var(axis=0))


def test_gmm_agrees_with_kmeans():
    rng = np.random.default_rng(2)
    centers = np.array([[0., 0.], [8., 0.], [0., 8.]])
    data = centers[np.repeat(np.arange(3), 30)] + rng.standard_normal((90, 2))
    labels, _ = init.gmm_em(data, 3, seed=3)
    assert metrics.nmi(labels, linalg.kmeans(data, 3, seed=3)) >= .95


def test_gmm_invalid():
    with pytest.raises(ValueError):
        init.gmm_em(np.zeros((5, 2)), 2, covariance_model='full')
    with pytest.raises(ValueError):
        init.gmm_em(np.zeros((2, 2)), 3)


def test_gmm_deterministic():
    data = np.random.default_rng(4).standard_normal((60, 2))
    a, _ = init.gmm_em(data, 3, seed=7)
    b, _ = init.gmm_em(data, 3, seed=7)
    assert np.array_equal(a, b)


def test_em_emb_without_covariates():
    A = two_cliques()
    z = init.em_emb(A, None, 2)
    assert metrics.misclustering_rate(z, np.repeat([0, 1], 5)) == 0.


def test_em_emb_empty_graph():
    rng = np.random.default_rng(5)
    centers = np.array([[0., 0., 1.], [-1., 1., 0.], [0., 0., 1.]])
    z = np.repeat(np.arange(3), 60)
    X = centers[z] + np.sqrt(.2) * rng.standard_normal((180, 3))
    labels = init.em_emb(sparse.csr_matrix((180, 180)), X, 3, seed=0)
    # clusters 0 and 2 share their center: only the merged partition is recoverable
    merged = np.where(z == 2, 0, z)
    counts = metrics.confusion(merged, labels, K=3)
    occupied = counts.sum(axis=0) > 0
    purity = counts.max(axis=0)[occupied] / counts.sum(axis=0)[occupied]
    assert np.all(purity >= .85)
    assert metrics.nmi(labels, z) < .9


def test_em_emb_fig1():
    scores = []
    for seed in range(10):
        A, X, z = fig1_instance(n=999, seed=seed)
        scores.append(metrics.nmi(init.em_emb(A, X, 3, seed=seed), z))
    assert np.mean(scores) >= .5


def test_spectral_two_cliques():
    z = np.repeat([0, 1], 5)
    for mode in ('adjacency', 'sym_laplacian'):
        labels = init.spectral_cluster(two_cliques(), 2, mode=mode)
        assert metrics.misclustering_rate(labels, z) == 0.


def test_spectral_noiseless_expected_matrix():
    z = np.repeat(np.arange(3), 20)
    Pi = np.array([[.6, .1, .2], [.1, .5, .05], [.2, .05, .4]])
    labels = init.spectral_cluster(models.expected_matrix(z, Pi), 3, mode='adjacency')
    assert metrics.misclustering_rate(labels, z) == 0.


def test_spectral_invalid_mode():
    with pytest.raises(ValueError):
        init.spectral_cluster(two_cliques(), 2, mode='random_walk')


def test_gaussian_kernel():
    X = np.array([[0.], [0.], [np.sqrt(2.)]])
    kernel = init.gaussian_kernel(X, bandwidth=1.).toarray()
    assert kernel[0, 1] == 1.
    assert kernel[0, 2] == pytest.approx(np.exp(-1.))


def test_gaussian_kernel_brute_force():
    X = np.random.default_rng(6).standard_normal((5, 2))
    kernel = init.gaussian_kernel(X, bandwidth=.7).toarray()
    for i in range(5):
        for j in range(5):
            expected = np.exp(-np.sum((X[i] - X[j]) ** 2) / (2 * .7 ** 2))
            assert kernel[i, j] == pytest.approx(expected)


def test_orl_sc_zero_grid():
    A, X, z = fig1_instance(n=150)
    kernel = init.gaussian_kernel(X)
    labels, lam = init.orl_sc(A, kernel, 3, z, lambda_grid=[0.])
    assert lam == 0.
    assert np.array_equal(labels, init.spectral_cluster(A, 3, mode='sym_laplacian'))


def test_orl_sc_prefers_informative_covariates():
    rng = np.random.default_rng(7)
    z = np.repeat([0, 1], 40)
    A = models.generate_sbm(z, np.full((2, 2), .01), rng=rng)
    X = np.array([[0.], [6.]])[z] + rng.standard_normal((80, 1))
    labels, lam = init.orl_sc(A, init.gaussian_kernel(X), 2, z, lambda_grid=[0., 1e6])
    assert lam == 1e6
    assert metrics.nmi(labels, z) > .8


def test_orl_sc_never_below_graph_only():
    A, X, z = fig1_instance(n=300, seed=2)
    labels, _ = init.orl_sc(A, init.gaussian_kernel(X), 3, z, lambda_grid=[0., .1, 1., 10.])
    graph_only = init.spectral_cluster(A, 3, mode='sym_laplacian')
    assert metrics.nmi(labels, z) >= metrics.nmi(graph_only, z)


def test_signed_spectral_init_noiseless():
    spec = models.SignedSbmSpec(100, 2, .5, 0., membership='balanced')
    A, z = models.generate_signed_sbm(spec, rng=0)
    assert metrics.misclustering_rate(init.signed_spectral_init(A, 2), z) == 0.


def test_signed_spectral_init_noisy_signs():
    spec = models.SignedSbmSpec(2000, 5, .04, .1, membership='balanced')
    scores = []
    for seed in range(3):
        A, z = models.generate_signed_sbm(spec, rng=seed)
        scores.append(metrics.nmi(init.signed_spectral_init(A, 5, seed=seed), z))
    assert np.mean(scores) >= .8


def test_signed_spectral_init_rejects_weights():
    with pytest.raises(ValueError):
        init.signed_spectral_init(utils.from_triplets(3, [(0, 1, 2.)]), 2)


def test_random_init_nonempty():
    z = init.random_init(4, 4, rng=0)
    assert sorted(z) == [0, 1, 2, 3]
    with pytest.raises(ValueError):
        init.random_init(2, 3)


def test_corrupt_labels():
    z = np.repeat(np.arange(2), 50)
    corrupted = init.corrupt_labels(z, 2, .1, rng=0)
    assert metrics.hamming(z, corrupted) == 10
    assert np.array_equal(init.corrupt_labels(z, 2, 0., rng=0), z)


def test_ensure_nonempty():
    z = init.ensure_nonempty(np.array([0, 0, 0, 1]), 3)
    assert np.array_equal(z, [2, 0, 0, 1])
    unchanged = np.array([1, 0, 2])
    assert np.array_equal(init.ensure_nonempty(unchanged, 3), unchanged)
