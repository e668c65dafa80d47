"""
Random graph models.
====================

Generators for the stochastic block model (SBM), its symmetric special case,
Gaussian node covariates (contextual SBM) and the signed SBM.

Graphs are returned as symmetric :class:`scipy.sparse.csr_matrix` with both
triangles stored; partitions as integer :class:`numpy.ndarray`.

.. autosummary::
    :toctree: generated/
    :nosignatures:

    generate_partition
    generate_sbm
    generate_covariates
    generate_signed_sbm
    expected_matrix
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import sparse

from csbm import linalg, utils


MEMBERSHIPS = ('multinomial', 'balanced', 'fixed')


def _check_membership(n, K, membership, weights, labels):
    if membership not in MEMBERSHIPS:
        raise ValueError(f"membership must be one of {MEMBERSHIPS}, got {membership}.")
    if K < 1:
        raise ValueError(f"K must be positive, got {K}.")
    if membership == 'fixed':
        if labels is None:
            raise ValueError("fixed membership requires labels.")
        utils.check_labels(labels, K=K, n=n)
    if weights is not None:
        if len(weights) != K:
            raise ValueError(f"Expected {K} membership weights, got {len(weights)}.")
        linalg.Multinomial(tuple(weights))


@dataclass(frozen=True)
class SbmSpec:
    """Stochastic block model.

    ``membership`` is 'multinomial' (i.i.d. labels with ``weights``, uniform
    by default), 'balanced' (cluster sizes floor(n/K) or ceil(n/K)) or
    'fixed' (``labels`` used verbatim)."""
    n: int
    K: int
    Pi: np.ndarray
    membership: str = 'multinomial'
    weights: Optional[tuple] = None
    labels: Optional[np.ndarray] = None
    self_loops: bool = False

    def __post_init__(self):
        Pi = np.atleast_2d(np.asarray(self.Pi, dtype=float))
        object.__setattr__(self, 'Pi', Pi)
        if Pi.shape != (self.K, self.K):
            raise ValueError(f"Pi must have shape ({self.K}, {self.K}), got {Pi.shape}.")
        if np.any(Pi < 0) or np.any(Pi > 1):
            raise ValueError("Pi entries must lie in [0, 1].")
        if np.max(np.abs(Pi - Pi.T)) > 1e-12:
            raise ValueError("Pi must be symmetric.")
        _check_membership(self.n, self.K, self.membership, self.weights, self.labels)


@dataclass(frozen=True)
class CovariateSpec:
    """Gaussian covariates X_i = mu_{z_i} + sigma * N(0, I_d)."""
    centers: np.ndarray
    sigma: float

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=float)
        if centers.ndim == 1:
            centers = centers.reshape(-1, 1)
        object.__setattr__(self, 'centers', centers)
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be non negative, got {self.sigma}.")

    @property
    def K(self):
        return self.centers.shape[0]

    @property
    def d(self):
        return self.centers.shape[1]


@dataclass(frozen=True)
class SignedSbmSpec:
    """Signed SBM: Erdos-Renyi(p) edges, +1 within and -1 across clusters,
    each sign flipped with probability eta."""
    n: int
    K: int
    p: float
    eta: float
    membership: str = 'multinomial'
    weights: Optional[tuple] = None
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise ValueError(f"p must lie in [0, 1], got {self.p}.")
        if not 0 <= self.eta < .5:
            raise ValueError(f"eta must lie in [0, 0.5), got {self.eta}.")
        _check_membership(self.n, self.K, self.membership, self.weights, self.labels)


def symmetric_pi(K, p, q):
    """Connectivity matrix with p on the diagonal and q elsewhere."""
    return np.full((K, K), float(q)) + (p - q) * np.eye(K)


def generate_partition(spec, rng=0):
    """Draws community labels according to ``spec.membership``.

    Args:
      spec: SbmSpec or SignedSbmSpec
      rng: numpy.random.Generator or int seed

    Returns:
      z: np.ndarray of shape (n,)
    """
    n, K = spec.n, spec.K
    if K > n:
        raise ValueError(f"K={K} exceeds n={n}.")
    if spec.membership == 'fixed':
        return utils.check_labels(spec.labels, K=K, n=n).copy()
    rng = linalg.make_rng(rng)
    if spec.membership == 'balanced':
        return rng.permutation(np.arange(n) % K)
    weights = spec.weights if spec.weights is not None else (1. / K,) * K
    return linalg.sample(linalg.Multinomial(tuple(weights)), rng, size=n).astype(np.int64)


def _decode_triangle(idx, m, diagonal):
    """Maps flat indices of the upper triangle of an m x m matrix to (row, col)."""
    rows = np.arange(m)
    if diagonal:
        offsets = rows * (2 * m - rows + 1) // 2
    else:
        offsets = rows * (2 * m - rows - 1) // 2
    r = np.searchsorted(offsets, idx, side='right') - 1
    c = r + (idx - offsets[r]) + (0 if diagonal else 1)
    return r, c


def _sample_pairs(count, prob, rng):
    """Indices of the successes among ``count`` independent Bernoulli(prob) trials."""
    if count == 0 or prob == 0:
        return np.empty(0, dtype=np.int64)
    m = rng.binomial(count, prob)
    return np.sort(rng.choice(count, size=m, replace=False)).astype(np.int64)


def generate_sbm(z, Pi, self_loops=False, rng=0):
    """Samples the adjacency matrix of an SBM.

    Each pair i < j (i <= j when ``self_loops``) is an edge independently with
    probability Pi[z_i, z_j]. Sampling is done block by block: a binomial
    edge count followed by a uniform choice of the pairs.

    Args:
      z: np.ndarray of shape (n,)
      Pi: np.ndarray of shape (K, K)
      self_loops: bool
      rng: numpy.random.Generator or int seed

    Returns:
      A: scipy.sparse.csr_matrix of shape (n, n)
        binary and symmetric.
    """
    Pi = np.atleast_2d(np.asarray(Pi, dtype=float))
    K = Pi.shape[0]
    z = utils.check_labels(z, K=K)
    n = z.shape[0]
    if np.any(Pi < 0) or np.any(Pi > 1) or np.max(np.abs(Pi - Pi.T)) > 1e-12:
        raise ValueError("Pi must be symmetric with entries in [0, 1].")
    rng = linalg.make_rng(rng)

    members = [np.flatnonzero(z == k) for k in range(K)]
    rows, cols = [], []
    for a in range(K):
        for b in range(a, K):
            n_a, n_b = members[a].size, members[b].size
            if a == b:
                count = n_a * (n_a + 1) // 2 if self_loops else n_a * (n_a - 1) // 2
                idx = _sample_pairs(count, Pi[a, a], rng)
                r, c = _decode_triangle(idx, n_a, self_loops)
                i, j = members[a][r], members[a][c]
            else:
                idx = _sample_pairs(n_a * n_b, Pi[a, b], rng)
                i, j = members[a][idx // n_b], members[b][idx % n_b]
            rows.append(np.minimum(i, j))
            cols.append(np.maximum(i, j))

    rows, cols = np.concatenate(rows), np.concatenate(cols)
    return utils.symmetric_from_upper(n, rows, cols, np.ones(rows.size))


def generate_covariates(z, spec, rng=0):
    """Row i is centers[z_i] plus isotropic Gaussian noise of scale sigma."""
    z = utils.check_labels(z, K=spec.K)
    rng = linalg.make_rng(rng)
    X = spec.centers[z].copy()
    if spec.sigma > 0:
        X += spec.sigma * rng.standard_normal(X.shape)
    return X


def generate_signed_sbm(spec, rng=0):
    """Samples a signed SBM.

    Returns:
      A: scipy.sparse.csr_matrix with entries in {-1, +1}
      z: np.ndarray of shape (n,)
    """
    rng = linalg.make_rng(rng)
    z = generate_partition(spec, rng)
    n = spec.n
    idx = _sample_pairs(n * (n - 1) // 2, spec.p, rng)
    i, j = _decode_triangle(idx, n, diagonal=False)
    signs = np.where(z[i] == z[j], 1., -1.)
    flips = rng.random(signs.size) < spec.eta
    signs[flips] *= -1
    return utils.symmetric_from_upper(n, i, j, signs), z


def expected_matrix(z, Pi):
    """P = Z Pi Z^T, diagonal included, as a csr matrix."""
    Pi = np.atleast_2d(np.asarray(Pi, dtype=float))
    z = utils.check_labels(z, K=Pi.shape[0])
    return sparse.csr_matrix(Pi[np.ix_(z, z)])
