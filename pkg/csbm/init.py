"""
Initialization methods.
=======================

Clusterers used to initialize the refinement algorithms, and as baselines:
Gaussian mixture EM, EM on the spectral embedding and the covariates
(EM-Emb), adjacency / Laplacian / kernel spectral clustering, the oracle
regularized Laplacian baseline (ORL-SC) and a signed spectral init.

.. autosummary::
    :toctree: generated/
    :nosignatures:

    gmm_em
    em_emb
    spectral_cluster
    gaussian_kernel
    orl_sc
    signed_spectral_init
    random_init
    corrupt_labels
    ensure_nonempty
"""

from dataclasses import dataclass
import warnings

import numpy as np
from scipy import sparse
from scipy.spatial.distance import cdist, pdist
from scipy.special import logsumexp
from sklearn.cluster import kmeans_plusplus

from csbm import linalg, metrics, utils


COVARIANCE_MODELS = ('spherical', 'diagonal')


@dataclass(frozen=True)
class GmmModel:
    """Fitted Gaussian mixture.

    ``variances`` has shape (K,) for the spherical model and (K, d) for the
    diagonal one. ``log_likelihood`` is the total log-likelihood of the data
    and ``history`` its value at every EM iteration."""
    weights: np.ndarray
    means: np.ndarray
    covariance_model: str
    variances: np.ndarray
    log_likelihood: float
    history: tuple = ()
    n_reseeds: int = 0


def _log_gaussian(data, means, variances):
    """log N(x_i | mu_k, diag(v_k)) for every (i, k); variances of shape (K, d)."""
    d = data.shape[1]
    out = np.empty((data.shape[0], means.shape[0]))
    for k in range(means.shape[0]):
        diff = data - means[k]
        out[:, k] = -.5 * (np.sum(diff ** 2 / variances[k], axis=1)
                           + np.sum(np.log(variances[k])) + d * np.log(2 * np.pi))
    return out


def _full_variances(variances, covariance_model, d):
    if covariance_model == 'spherical':
        return np.repeat(variances[:, None], d, axis=1)
    return variances


def _em_run(data, K, covariance_model, tol, max_iter, floor, centers):
    n, d = data.shape
    data_var = data.var(axis=0)
    weights = np.full(K, 1. / K)
    means = np.array(centers, dtype=float)
    if covariance_model == 'spherical':
        variances = np.full(K, max(data_var.mean(), floor))
    else:
        variances = np.tile(np.maximum(data_var, floor), (K, 1))

    history = []
    n_reseeds = 0
    reseeded = False
    for it in range(max_iter):
        # E step
        log_prob = np.log(weights) + _log_gaussian(
            data, means, _full_variances(variances, covariance_model, d))
        log_norm = logsumexp(log_prob, axis=1)
        resp = np.exp(log_prob - log_norm[:, None])
        ll = float(log_norm.sum())
        if history and not reseeded and ll < history[-1] - 1e-8 * max(1., abs(history[-1])):
            warnings.warn(f"EM log-likelihood decreased from {history[-1]:.6g} to {ll:.6g}.",
                          RuntimeWarning)
        converged = bool(history) and not reseeded and abs(ll - history[-1]) < tol * n
        history.append(ll)
        if converged:
            break

        # M step
        degenerate = np.flatnonzero(resp.sum(axis=0) < 1.)
        reseeded = degenerate.size > 0
        fit = log_norm.copy()
        for k in degenerate:
            worst = int(np.argmin(fit))
            fit[worst] = np.inf
            resp[worst] = 0.
            resp[worst, k] = 1.
            n_reseeds += 1
        mass = np.maximum(resp.sum(axis=0), np.finfo(float).tiny)
        weights = mass / mass.sum()
        means = (resp.T @ data) / mass[:, None]
        sq = np.stack([resp[:, k] @ (data - means[k]) ** 2 for k in range(K)]) / mass[:, None]
        if covariance_model == 'spherical':
            variances = np.maximum(sq.mean(axis=1), floor)
        else:
            variances = np.maximum(sq, floor)
        # reseeded components restart from the data spread
        for k in degenerate:
            variances[k] = max(data_var.mean(), floor) if covariance_model == 'spherical' \
                else np.maximum(data_var, floor)

    labels = np.argmax(resp, axis=1)
    model = GmmModel(weights=weights, means=means, covariance_model=covariance_model,
                     variances=variances, log_likelihood=history[-1], history=tuple(history),
                     n_reseeds=n_reseeds)
    return labels, model


def gmm_em(data, K, covariance_model='diagonal', tol=1e-6, max_iter=200, restarts=3, seed=0):
    """Gaussian mixture clustering by expectation maximization.

    Each restart starts from k-means++ centers, uniform weights and the data
    variance. A component whose responsibility mass falls below one point is
    reseeded on the worst-fit point.

    Args:
      data: np.ndarray of shape (n, d) or (n,)

      K: int

      covariance_model: str
        'spherical' or 'diagonal'.

      tol: float
        stop when the mean per-sample log-likelihood changes by less than tol.

      max_iter: int

      restarts: int
        the run with the highest final log-likelihood is kept, ties broken
        by restart index.

      seed: int

    Returns:
      labels: np.ndarray of shape (n,)
        maximal responsibility component of each row.

      model: GmmModel
    """
    data = np.asarray(data, dtype=float)
    if data.ndim == 1:
        data = data.reshape(-1, 1)
    if covariance_model not in COVARIANCE_MODELS:
        raise ValueError(f"covariance_model must be one of {COVARIANCE_MODELS}, "
                         f"got {covariance_model}.")
    if not 1 <= K <= data.shape[0]:
        raise ValueError(f"K must lie in [1, {data.shape[0]}], got {K}.")
    if restarts < 1:
        raise ValueError(f"restarts must be at least 1, got {restarts}.")
    if not np.all(np.isfinite(data)):
        raise ValueError("data must be finite.")

    total_var = data.var(axis=0).mean()
    floor = 1e-6 * total_var if total_var > 0 else 1e-6
    n_distinct = np.unique(data, axis=0).shape[0]

    best = None
    for restart in range(restarts):
        random_state = linalg.seed_int(seed, 'gmm', restart)
        if n_distinct >= K:
            centers, _ = kmeans_plusplus(data, K, random_state=random_state)
        else:
            rng = np.random.default_rng(random_state)
            centers = data[rng.choice(data.shape[0], size=K, replace=False)]
        labels, model = _em_run(data, K, covariance_model, tol, max_iter, floor, centers)
        if best is None or model.log_likelihood > best[1].log_likelihood:
            best = labels, model

    labels, model = best
    if model.n_reseeds > 3:
        warnings.warn(f"A degenerate mixture component was reseeded {model.n_reseeds} times.",
                      RuntimeWarning)
    return labels, model


def spectral_embedding(A, K, tol=1e-8, seed=0):
    """Top-K |eigenvalue| eigenvectors of A, eigenvectors of zero eigenvalues dropped."""
    res = linalg.eigs_topk_abs(A, K, tol=tol, seed=seed)
    keep = res.eigenvalues != 0
    return res.eigenvectors[:, keep], res.eigenvalues[keep]


def em_emb(A, X, K, covariance_model='diagonal', restarts=3, tol=1e-6, max_iter=200,
           eig_tol=1e-8, seed=0):
    """EM on the spectral embedding of the graph concatenated with the covariates.

    Args:
      A: scipy.sparse matrix of shape (n, n)

      X: np.ndarray of shape (n, d), or None

      K: int

      seed: int
        seeds both the eigensolver and the mixture restarts.

    Returns:
      labels: np.ndarray of shape (n,)
    """
    n = A.shape[0]
    U, _ = spectral_embedding(A, K, tol=eig_tol, seed=seed)
    blocks = [U]
    if X is not None:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.shape[0] != n:
            raise ValueError(f"X has {X.shape[0]} rows, the graph has {n} nodes.")
        blocks.append(X)
    features = np.hstack(blocks)
    if features.shape[1] == 0:
        raise ValueError("Empty graph and no covariates: nothing to cluster on.")
    labels, _ = gmm_em(features, K, covariance_model=covariance_model, tol=tol,
                       max_iter=max_iter, restarts=restarts, seed=seed)
    return labels


def _inv_sqrt(x):
    return np.divide(1., np.sqrt(x), out=np.zeros_like(x), where=x > 0)


def spectral_cluster(M, K, mode='adjacency', tau=None, restarts=10, tol=1e-8, seed=0):
    """Spectral clustering of a symmetric matrix.

    Args:
      M: scipy.sparse matrix of shape (n, n)

      K: int

      mode: str
        'adjacency' embeds with the top-K |eigenvalue| eigenvectors of M,
        each scaled by its |eigenvalue|. 'sym_laplacian' embeds with the
        top-K eigenvectors of (D + tau)^{-1/2} M (D + tau)^{-1/2}, rows
        normalized.

      tau: float, optional
        degree regularization, defaults to the mean degree.

    Returns:
      labels: np.ndarray of shape (n,)
    """
    n = M.shape[0]
    if not 1 <= K <= n:
        raise ValueError(f"K must lie in [1, {n}], got {K}.")
    M = sparse.csr_matrix(M, dtype=float)
    if mode == 'adjacency':
        res = linalg.eigs_topk_abs(M, K, tol=tol, seed=seed)
        embedding = res.eigenvectors * np.abs(res.eigenvalues)
    elif mode == 'sym_laplacian':
        degrees = np.asarray(abs(M).sum(axis=1)).ravel()
        if tau is None:
            tau = degrees.mean()
        d = sparse.diags(_inv_sqrt(degrees + tau))
        res = linalg.eigs_topk(d @ M @ d, K, which='algebraic', tol=tol, seed=seed)
        embedding = res.eigenvectors
        norms = np.linalg.norm(embedding, axis=1, keepdims=True)
        embedding = np.divide(embedding, norms, out=np.zeros_like(embedding), where=norms > 0)
    else:
        raise ValueError(f"mode must be 'adjacency' or 'sym_laplacian', got {mode}.")
    return linalg.kmeans(embedding, K, restarts=restarts, seed=seed)


def gaussian_kernel(X, bandwidth=None):
    """K_ij = exp(-||X_i - X_j||^2 / (2 bandwidth^2)).

    The bandwidth defaults to the median pairwise distance."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if bandwidth is None:
        dists = pdist(X)
        bandwidth = float(np.median(dists)) if dists.size else 1.
        if bandwidth == 0.:
            bandwidth = 1.
    if bandwidth <= 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}.")
    kernel = np.exp(-cdist(X, X, 'sqeuclidean') / (2 * bandwidth ** 2))
    np.fill_diagonal(kernel, 1.)
    return sparse.csr_matrix(kernel)


def default_lambda_grid(A, Kmat, size=20):
    """Log-spaced grid spanning ||A|| / ||Kmat|| * 10^{+-2}."""
    norm_a, _ = utils.power_iteration(A)
    norm_k, _ = utils.power_iteration(Kmat)
    ratio = norm_a / norm_k if norm_k > 0 and norm_a > 0 else 1.
    return ratio * np.logspace(-2, 2, size)


def orl_sc(A, Kmat, K, z_true, lambda_grid=None, mode='sym_laplacian', seed=0):
    """Oracle baseline: spectral clustering of A + lambda Kmat, lambda maximizing NMI.

    Args:
      A: scipy.sparse matrix of shape (n, n)
      Kmat: scipy.sparse matrix of shape (n, n)
        covariate similarity, typically :func:`gaussian_kernel`.
      K: int
      z_true: np.ndarray of shape (n,)
      lambda_grid: sequence of floats, optional
      mode: str
        passed to :func:`spectral_cluster`.
      seed: int

    Returns:
      labels: np.ndarray of shape (n,)
      best_lambda: float
        first grid value reaching the maximal NMI.
    """
    if lambda_grid is None:
        lambda_grid = default_lambda_grid(A, Kmat)
    lambda_grid = list(lambda_grid)
    if len(lambda_grid) == 0:
        raise ValueError("lambda_grid is empty.")
    A = sparse.csr_matrix(A, dtype=float)
    Kmat = sparse.csr_matrix(Kmat, dtype=float)

    best = None
    for lam in lambda_grid:
        labels = spectral_cluster(A + lam * Kmat, K, mode=mode, seed=seed)
        score = metrics.nmi(labels, z_true)
        if best is None or score > best[0]:
            best = score, labels, float(lam)
    return best[1], best[2]


def signed_spectral_init(A_signed, K, seed=0):
    """Spectral clustering of a signed adjacency matrix with entries in {-1, +1}."""
    A_signed = sparse.csr_matrix(A_signed, dtype=float)
    if not np.all(np.isin(A_signed.data, (-1., 1.))):
        raise ValueError("Signed adjacency entries must be -1 or +1.")
    return spectral_cluster(A_signed, K, mode='adjacency', seed=seed)


def random_init(n, K, rng=0):
    """i.i.d. uniform labels, redrawn until every cluster is nonempty."""
    if K > n:
        raise ValueError(f"K={K} exceeds n={n}.")
    rng = linalg.make_rng(rng)
    while True:
        z = rng.integers(K, size=n)
        if np.all(np.bincount(z, minlength=K) > 0):
            return z


def corrupt_labels(z, K, fraction, rng=0):
    """Moves a uniformly chosen fraction of the nodes to another uniform cluster."""
    if not 0 <= fraction <= 1:
        raise ValueError(f"fraction must lie in [0, 1], got {fraction}.")
    z = utils.check_labels(z, K=K).copy()
    if K < 2:
        return z
    rng = linalg.make_rng(rng)
    n_moved = int(round(fraction * z.shape[0]))
    moved = rng.choice(z.shape[0], size=n_moved, replace=False)
    shift = rng.integers(1, K, size=n_moved)
    z[moved] = (z[moved] + shift) % K
    return z


def ensure_nonempty(z, K):
    """Fills each empty cluster with the lowest-index node of the largest cluster."""
    z = utils.check_labels(z, K=K).copy()
    if K > z.shape[0]:
        raise ValueError(f"K={K} exceeds n={z.shape[0]}.")
    sizes = utils.cluster_sizes(z, K)
    for k in np.flatnonzero(sizes == 0):
        largest = int(np.argmax(sizes))
        i = int(np.flatnonzero(z == largest)[0])
        z[i] = k
        sizes[largest] -= 1
        sizes[k] += 1
    return z
