"""
Iterative refinement.
=====================

Lloyd-type refinement of a partition for graphs with node covariates: the
model parameters are estimated from the current partition, then every node
is moved to the cluster minimizing a least squares criterion (IR-LS,
sIR-LS, IR-LSS) or maximizing a Bernoulli-Gaussian likelihood (IR-MAP).
Signed graphs are refined with IR-SSBM.

.. autosummary::
    :toctree: generated/
    :nosignatures:

    estimate_params
    sigma_spec
    refine_criterion
    refine_step
    ir_ssbm_step
    ir_map_step
    ir_cluster
    pooled_sigma
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.spatial.distance import cdist

from csbm import linalg, utils
from csbm.utils.logging import RefinementTrace


VARIANTS = {'ir-ls': 'IR-LS', 'sir-ls': 'sIR-LS', 'ir-lss': 'IR-LSS',
            'ir-map': 'IR-MAP', 'ir-ssbm': 'IR-SSBM'}

LEAST_SQUARES = ('IR-LS', 'sIR-LS', 'IR-LSS')

CHUNK_ROWS = 2048


class EmptyClusterError(ValueError):
    """Raised when parameters are estimated from a partition with an empty cluster."""


class NonAssortativeError(ValueError):
    """Raised by IR-LSS when the estimated within-cluster probability does not
    exceed the between-cluster one."""


def canonical_variant(variant):
    try:
        return VARIANTS[str(variant).lower()]
    except KeyError:
        raise ValueError(f"Unknown variant {variant}, "
                         f"expected one of {sorted(VARIANTS.values())}.") from None


@dataclass(frozen=True)
class BlockParams:
    """Parameters estimated from a partition.

    ``AW`` is A W with W = Z D^{-1} the normalized membership matrix, so that
    row i holds the mean edge weight from node i to every cluster and
    ``Pi_hat = W^T A W``."""
    labels: np.ndarray
    n_k: np.ndarray
    Pi_hat: np.ndarray
    mu_hat: Optional[np.ndarray]
    AW: np.ndarray
    W: sparse.csr_matrix

    @property
    def K(self):
        return self.n_k.shape[0]

    @property
    def n(self):
        return int(self.n_k.sum())


@dataclass(frozen=True)
class SigmaSpec:
    """Weights of the least squares criterion.

    ``weights[k, k']`` multiplies the squared deviation of the k'-th
    coordinate when testing cluster k. ``lam`` is the common scalar for the
    spherical variants and None for IR-LS."""
    variant: str
    weights: np.ndarray
    lam: Optional[float] = None


def _check_graph(A):
    A = sparse.csr_matrix(A, dtype=float)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"Adjacency matrix must be square, got shape {A.shape}.")
    return A


def _check_covariates(X, n):
    if X is None:
        return None
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.shape[0] != n:
        raise ValueError(f"X has {X.shape[0]} rows, the graph has {n} nodes.")
    if X.shape[1] == 0:
        return None
    return X


def estimate_params(A, X, z, K=None):
    """Cluster sizes, connectivity and centers of the partition z.

    Args:
      A: scipy.sparse matrix of shape (n, n)

      X: np.ndarray of shape (n, d), or None

      z: np.ndarray of shape (n,)

      K: int, optional
        defaults to the largest label plus one.

    Returns:
      params: BlockParams
    """
    A = _check_graph(A)
    n = A.shape[0]
    z = utils.check_labels(z, K=K, n=n)
    if K is None:
        K = int(z.max()) + 1
    n_k = utils.cluster_sizes(z, K)
    if np.any(n_k == 0):
        raise EmptyClusterError(f"Clusters {np.flatnonzero(n_k == 0).tolist()} are empty.")
    W = utils.normalized_membership(z, K)
    AW = np.asarray((A @ W).todense())
    Pi_hat = np.asarray(W.T @ AW)
    X = _check_covariates(X, n)
    mu_hat = None if X is None else np.asarray(W.T @ X)
    return BlockParams(labels=z, n_k=n_k, Pi_hat=Pi_hat, mu_hat=mu_hat, AW=AW, W=W)


def _clamp(Pi, clamp_eps, n):
    eps = 1. / n ** 2 if clamp_eps is None else clamp_eps
    return np.clip(Pi, eps, 1. - eps)


def sigma_spec(variant, params, clamp_eps=None):
    """Criterion weights of a least squares variant.

    IR-LS weights coordinate k' of cluster k by n_k' / Pi_kk'; sIR-LS uses
    min_k n_k / max Pi; IR-LSS uses n / (K (p - q)) log(p (1 - q) / (q (1 - p)))
    with p and q the mean diagonal and off-diagonal estimates.

    Args:
      variant: str
        'IR-LS', 'sIR-LS' or 'IR-LSS'.

      params: BlockParams

      clamp_eps: float, optional
        estimates are clamped into [clamp_eps, 1 - clamp_eps]; defaults to 1/n^2.

    Returns:
      sigma: SigmaSpec
    """
    variant = canonical_variant(variant)
    if variant not in LEAST_SQUARES:
        raise ValueError(f"{variant} has no least squares weights.")
    K, n = params.K, params.n
    Pi = _clamp(params.Pi_hat, clamp_eps, n)
    if variant == 'IR-LS':
        return SigmaSpec(variant, params.n_k[None, :] / Pi)
    if variant == 'sIR-LS':
        lam = float(params.n_k.min() / Pi.max())
        return SigmaSpec(variant, np.full((K, K), lam), lam)

    if K < 2:
        raise ValueError("IR-LSS requires at least two clusters.")
    p = np.mean(np.diag(Pi))
    q = Pi[~np.eye(K, dtype=bool)].mean()
    if p <= q:
        raise NonAssortativeError(f"non-assortative estimate (p={p:.4g} <= q={q:.4g}); "
                                  f"use IR-LS or sIR-LS")
    lam = float(n / (K * (p - q)) * np.log(p * (1 - q) / (q * (1 - p))))
    return SigmaSpec(variant, np.full((K, K), lam), lam)


def _covariate_term(X, mu_hat, sigma_noise, scale=1.):
    if X is None:
        return 0.
    if sigma_noise is None or not sigma_noise > 0:
        raise ValueError(f"sigma_noise must be positive when covariates are given, "
                         f"got {sigma_noise}.")
    return cdist(X, mu_hat, 'sqeuclidean') / (scale * sigma_noise ** 2)


def refine_criterion(params, sigma, X=None, sigma_noise=None):
    """Least squares criterion of every (node, cluster) pair.

    crit[i, k] = sum_k' weights[k, k'] (AW[i, k'] - Pi_hat[k, k'])^2
                 + ||X_i - mu_k||^2 / sigma_noise^2

    Returns:
      crit: np.ndarray of shape (n, K)
    """
    AW, Pi, weights = params.AW, params.Pi_hat, sigma.weights
    crit = np.empty(AW.shape)
    for start in range(0, AW.shape[0], CHUNK_ROWS):
        block = AW[start:start + CHUNK_ROWS]
        diff = block[:, None, :] - Pi[None, :, :]
        crit[start:start + CHUNK_ROWS] = np.sum(diff ** 2 * weights[None], axis=2)
    X = _check_covariates(X, AW.shape[0])
    return crit + _covariate_term(X, params.mu_hat, sigma_noise)


def refine_step(A, X, params, sigma, sigma_noise=None):
    """One synchronous least squares refinement step.

    Every node is moved to the cluster minimizing :func:`refine_criterion`,
    computed from the snapshot ``params``; ties go to the lowest index.
    ``A`` is unused beyond the products already held by ``params`` and kept
    for symmetry with the other steps.

    Returns:
      z: np.ndarray of shape (n,)
    """
    crit = refine_criterion(params, sigma, X, sigma_noise)
    return np.argmin(crit, axis=1)


def ir_ssbm_step(A_signed, z_in, K=None):
    """Signed refinement step: z_i = argmax_k (A W)_ik, ties to the lowest k."""
    params = estimate_params(A_signed, None, z_in, K)
    return np.argmax(params.AW, axis=1)


def map_score(A, X, params, sigma_noise=None, clamp_eps=None):
    """Bernoulli-Gaussian log-likelihood of every (node, cluster) pair.

    score[i, k] = sum_{j != i} A_ij log Pi_{k z_j} + (1 - A_ij) log(1 - Pi_{k z_j})
                  - ||X_i - mu_k||^2 / (2 sigma_noise^2)

    The pairwise sum is evaluated over dense row blocks of A.
    """
    A = _check_graph(A)
    n, z = A.shape[0], params.labels
    Pi = _clamp(params.Pi_hat, clamp_eps, n)
    log_p = np.log(Pi)[:, z]
    log_q = np.log1p(-Pi)[:, z]
    diag = A.diagonal()

    score = np.empty((n, params.K))
    for start in range(0, n, CHUNK_ROWS):
        rows = slice(start, min(start + CHUNK_ROWS, n))
        block = A[rows].toarray()
        score[rows] = np.einsum('ij,kj->ik', block, log_p) \
            + np.einsum('ij,kj->ik', 1. - block, log_q)
    # remove the j = i terms
    own = np.arange(n)
    score -= diag[:, None] * log_p[:, own].T + (1. - diag)[:, None] * log_q[:, own].T

    X = _check_covariates(X, n)
    return score - _covariate_term(X, params.mu_hat, sigma_noise, scale=2.)


def ir_map_step(A, X, params, sigma_noise=None, clamp_eps=None):
    """One synchronous likelihood refinement step, argmax of :func:`map_score`."""
    return np.argmax(map_score(A, X, params, sigma_noise, clamp_eps), axis=1)


def pooled_sigma(X, z, mu):
    """Pooled within-cluster standard deviation sqrt(sum ||X_i - mu_z_i||^2 / (n d))."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    z = utils.check_labels(z, K=mu.shape[0], n=X.shape[0])
    return float(np.sqrt(np.sum((X - mu[z]) ** 2) / X.size))


def _criterion(variant, A, X, params, sigma_noise, clamp_eps):
    """Criterion to minimize for the given variant, shape (n, K)."""
    if variant in LEAST_SQUARES:
        sigma = sigma_spec(variant, params, clamp_eps)
        return refine_criterion(params, sigma, X, sigma_noise)
    if variant == 'IR-MAP':
        return -map_score(A, X, params, sigma_noise, clamp_eps)
    return -params.AW


def fill_empty_clusters(crit, z, K):
    """Moves nodes into empty clusters.

    Each empty cluster, in increasing order, receives the node whose move
    from a cluster of size at least two increases the criterion the least.

    Returns:
      z: np.ndarray of shape (n,)
      n_moves: int
    """
    z = z.copy()
    n = z.shape[0]
    sizes = utils.cluster_sizes(z, K)
    n_moves = 0
    for k in np.flatnonzero(sizes == 0):
        movable = sizes[z] > 1
        if not np.any(movable):
            raise linalg.DegenerateClusteringError(
                f"No node can be moved into empty cluster {k}.")
        cost = crit[np.arange(n), k] - crit[np.arange(n), z]
        cost[~movable] = np.inf
        i = int(np.argmin(cost))
        sizes[z[i]] -= 1
        sizes[k] += 1
        z[i] = k
        n_moves += 1
    return z, n_moves


def ir_cluster(A, X, K, sigma_noise=None, z0=None, T=None, variant='IR-LS', clamp_eps=None,
               estimate_sigma=False, z_true=None, profile=None, callback=None):
    """Iterative refinement clustering.

    Alternates parameter estimation and synchronous node reassignment for T
    iterations, or until the partition no longer changes.

    Args:
      A: scipy.sparse matrix of shape (n, n)
        symmetric adjacency matrix; binary, signed or weighted.

      X: np.ndarray of shape (n, d), or None
        node covariates; ignored by IR-SSBM.

      K: int

      sigma_noise: float
        covariate noise scale, required when X is given unless
        ``estimate_sigma`` is set.

      z0: np.ndarray of shape (n,)
        initial partition with K nonempty clusters.

      T: int
        maximal number of iterations, defaults to ceil(3 log2 n).

      variant: str
        'IR-LS', 'sIR-LS', 'IR-LSS', 'IR-MAP' or 'IR-SSBM', case insensitive.

      clamp_eps: float
        connectivity estimates are clamped into [clamp_eps, 1 - clamp_eps]
        before ratios and logarithms; defaults to 1/n^2.

      estimate_sigma: bool
        re-estimate sigma_noise at every iteration with :func:`pooled_sigma`.

      z_true: np.ndarray, optional
        reference partition recorded in the trace.

      profile: csbm.metrics.SeparationProfile, optional
        separation table for the loss recorded in the trace.

      callback: callable, optional
        called with the loop's locals after every iteration; returning
        False stops the run.

    Returns:
      z: np.ndarray of shape (n,)

      trace: RefinementTrace
    """
    variant = canonical_variant(variant)
    A = _check_graph(A)
    n = A.shape[0]
    if z0 is None:
        raise ValueError("An initial partition z0 is required.")
    z = utils.check_labels(z0, K=K, n=n).copy()
    empty = np.flatnonzero(utils.cluster_sizes(z, K) == 0)
    if empty.size:
        raise ValueError(f"Initial partition has empty clusters {empty.tolist()}.")
    X = None if variant == 'IR-SSBM' else _check_covariates(X, n)
    if X is not None and sigma_noise is None and not estimate_sigma:
        raise ValueError("sigma_noise is required with covariates unless estimate_sigma is set.")
    if T is None:
        T = int(np.ceil(3 * np.log2(max(n, 2))))
    if T < 0:
        raise ValueError(f"T must be non negative, got {T}.")

    trace = callback if isinstance(callback, RefinementTrace) else \
        RefinementTrace(z_true=z_true, profile=profile)
    objective = np.nan
    changed = 0
    converged = False
    it = 0
    trace(locals())

    for it in range(1, T + 1):
        params = estimate_params(A, X, z, K)
        if estimate_sigma and X is not None:
            sigma_noise = max(pooled_sigma(X, z, params.mu_hat), np.finfo(float).eps)
        crit = _criterion(variant, A, X, params, sigma_noise, clamp_eps)
        z_new = np.argmin(crit, axis=1)
        z_new, n_moves = fill_empty_clusters(crit, z_new, K)
        objective = float(crit[np.arange(n), z_new].sum())
        changed = int(np.count_nonzero(z_new != z))
        converged = changed == 0
        z = z_new

        trace(locals())
        if callback is not None and callback is not trace:
            if callback(locals()) is False:
                break
        if converged:
            break

    return z, trace
