"""
Clustering metrics.
===================

Agreement measures between partitions (NMI, misclustering rate, Hamming
distance) and the separation quantities used to diagnose refinement runs.

.. autosummary::
    :toctree: generated/
    :nosignatures:

    confusion
    hungarian
    misclustering_rate
    nmi
    hamming
    separation_profile
    loss_l
    snr_tilde
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist
from sklearn.metrics import confusion_matrix, normalized_mutual_info_score

from csbm import utils


def _pair(z, z_prime):
    z, z_prime = utils.check_labels(z), utils.check_labels(z_prime)
    if z.shape[0] != z_prime.shape[0]:
        raise ValueError(f"Partitions have different lengths: {z.shape[0]} and {z_prime.shape[0]}.")
    return z, z_prime


def confusion(z, z_hat, K=None):
    """counts[a, b] = #{i : z_i = a, z_hat_i = b}.

    Args:
      z, z_hat: np.ndarray of shape (n,)
      K: int, optional
        number of clusters; defaults to the largest label plus one.

    Returns:
      counts: np.ndarray of shape (K, K)
    """
    z, z_hat = _pair(z, z_hat)
    if K is None:
        K = int(max(z.max(initial=-1), z_hat.max(initial=-1))) + 1
    if z.size == 0:
        return np.zeros((K, K), dtype=np.int64)
    return confusion_matrix(z, z_hat, labels=np.arange(K)).astype(np.int64)


def hungarian(cost, rtol=1e-9):
    """Minimum cost perfect matching on a square matrix.

    Among optimal matchings, the lexicographically smallest permutation is
    returned.

    Args:
      cost: np.ndarray of shape (K, K)
      rtol: float
        relative tolerance under which two totals are considered equal.

    Returns:
      perm: np.ndarray of shape (K,)
        row a is matched to column perm[a].
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise ValueError(f"cost must be a square matrix, got shape {cost.shape}.")
    if not np.all(np.isfinite(cost)):
        raise ValueError("cost entries must be finite.")
    K = cost.shape[0]
    rows, cols = linear_sum_assignment(cost)
    optimum = cost[rows, cols].sum()
    atol = rtol * max(1., abs(optimum))

    perm = np.empty(K, dtype=np.int64)
    free = list(range(K))
    fixed = 0.
    for row in range(K):
        for col in free:
            rest_rows = np.arange(row + 1, K)
            rest_cols = np.array([c for c in free if c != col], dtype=np.int64)
            rest = 0.
            if rest_rows.size:
                sub = cost[np.ix_(rest_rows, rest_cols)]
                r, c = linear_sum_assignment(sub)
                rest = sub[r, c].sum()
            if fixed + cost[row, col] + rest <= optimum + atol:
                perm[row] = col
                fixed += cost[row, col]
                free.remove(col)
                break
    return perm


def misclustering_rate(z_hat, z, K=None):
    """Fraction of misassigned nodes, minimized over relabelings of z_hat.

    The best relabeling is the maximum-agreement assignment on the confusion
    matrix."""
    z_hat, z = _pair(z_hat, z)
    n = z.shape[0]
    if n == 0:
        return 0.
    counts = confusion(z, z_hat, K=K)
    perm = hungarian(-counts)
    agreement = counts[np.arange(counts.shape[0]), perm].sum()
    return float((n - agreement) / n)


def nmi(z1, z2):
    """Normalized mutual information 2 I / (H1 + H2), natural logarithms.

    Partitions equal up to relabeling score exactly 1."""
    z1, z2 = _pair(z1, z2)
    nonzero = confusion(z1, z2) > 0
    if np.all(nonzero.sum(axis=0) <= 1) and np.all(nonzero.sum(axis=1) <= 1):
        return 1.
    value = normalized_mutual_info_score(z1, z2, average_method='arithmetic')
    return float(np.clip(value, 0., 1.))


def hamming(z, z_prime):
    """Number of positions where the partitions differ, without relabeling."""
    z, z_prime = _pair(z, z_prime)
    return int(np.count_nonzero(z != z_prime))


@dataclass(frozen=True)
class SeparationProfile:
    """Pairwise separations Delta^2(a, b) = ||mu_a - mu_b||^2 + lam ||Pi_a - Pi_b||^2."""
    delta_sq: np.ndarray
    delta_min: float
    lam: float

    @property
    def K(self):
        return self.delta_sq.shape[0]


def separation_profile(mu, Pi, lam=1.):
    """Builds the separation table of a model.

    Args:
      mu: np.ndarray of shape (K, d), or None when there are no covariates
      Pi: np.ndarray of shape (K, K), or None for covariates only
      lam: float
        weight of the connectivity rows, non negative.

    Returns:
      profile: SeparationProfile
    """
    if lam < 0:
        raise ValueError(f"lam must be non negative, got {lam}.")
    if mu is None and Pi is None:
        raise ValueError("At least one of mu and Pi is required.")
    if mu is not None:
        mu = np.asarray(mu, dtype=float)
        if mu.ndim == 1:
            mu = mu.reshape(-1, 1)
        K = mu.shape[0]
    else:
        K = np.atleast_2d(Pi).shape[0]
    delta_sq = np.zeros((K, K))
    if mu is not None and mu.shape[1]:
        delta_sq += cdist(mu, mu, 'sqeuclidean')
    if Pi is not None:
        Pi = np.atleast_2d(np.asarray(Pi, dtype=float))
        if Pi.shape != (K, K):
            raise ValueError(f"Pi must have shape ({K}, {K}), got {Pi.shape}.")
        delta_sq += lam * cdist(Pi, Pi, 'sqeuclidean')
    np.fill_diagonal(delta_sq, 0.)
    delta_sq = (delta_sq + delta_sq.T) / 2
    off = ~np.eye(K, dtype=bool)
    delta_min = float(delta_sq[off].min()) if K > 1 else np.inf
    return SeparationProfile(delta_sq=delta_sq, delta_min=delta_min, lam=float(lam))


def loss_l(z, z_prime, profile):
    """l(z, z') = sum_i Delta^2(z_i, z'_i) over the nodes where they differ."""
    z, z_prime = _pair(z, z_prime)
    if z.size and max(z.max(), z_prime.max()) >= profile.K:
        raise ValueError(f"labels must be smaller than K={profile.K}.")
    return float(profile.delta_sq[z, z_prime].sum())


def snr_tilde(mu, p_prime, q_prime, n, K):
    """Signal-to-noise ratio of a symmetric contextual SBM.

    (1/8) min ||mu_k - mu_k'||^2 + (log n / K) (sqrt(p') - sqrt(q'))^2, where
    the edge probabilities are p' log n / n and q' log n / n.
    """
    if K < 2:
        raise ValueError(f"K must be at least 2, got {K}.")
    if not p_prime >= q_prime >= 0:
        raise ValueError(f"Expected p' >= q' >= 0, got p'={p_prime}, q'={q_prime}.")
    covariate_term = 0.
    if mu is not None:
        mu = np.asarray(mu, dtype=float).reshape(K, -1)
        if mu.shape[1]:
            dist = cdist(mu, mu, 'sqeuclidean')
            covariate_term = dist[~np.eye(K, dtype=bool)].min() / 8
    graph_term = np.log(n) / K * (np.sqrt(p_prime) - np.sqrt(q_prime)) ** 2
    return float(covariate_term + graph_term)
