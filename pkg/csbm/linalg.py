"""
Numerical kernels.
==================

Seeded sampling, sparse symmetric products, a top-K eigensolver and k-means,
shared by every other module.

Randomness is always explicit: functions take either an integer seed or a
:class:`numpy.random.Generator`. Independent sub-streams are derived from a
base seed and a tuple of keys (run index, purpose tag, ...) with
:func:`make_rng`.
"""

from dataclasses import dataclass
from numbers import Number
import warnings

import numpy as np
from scipy import linalg as sla
from scipy import optimize
from scipy import sparse
from scipy.sparse import linalg as spla
from scipy.spatial.distance import cdist
from sklearn.cluster import kmeans_plusplus

from csbm import utils


DENSE_MAX_N = 512


class ConvergenceError(RuntimeError):
    """Raised when the eigensolver does not converge within max_iter.

    The residuals achieved by the pairs that did converge are available as
    the ``residuals`` attribute."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class DegenerateClusteringError(ValueError):
    """Raised when a partition into K nonempty clusters cannot be produced."""


# Random streams

def make_rng(seed=0, *keys):
    """Returns a Generator for the sub-stream of ``seed`` identified by ``keys``.

    Keys are integers or strings (purpose tags); strings are mapped to
    integers with a stable hash so that streams do not depend on the
    interpreter's hash seed.

    Args:
      seed: int, numpy.random.SeedSequence or numpy.random.Generator
        If a Generator is given and no keys, it is returned as is.

      keys: ints or strs

    Returns:
      rng: numpy.random.Generator
    """
    if isinstance(seed, np.random.Generator):
        if not keys:
            return seed
        seed = int(seed.integers(2 ** 63))
    return np.random.default_rng(derive_seed(seed, *keys))


def derive_seed(seed, *keys):
    """SeedSequence of the sub-stream identified by ``keys``."""
    if isinstance(seed, np.random.SeedSequence):
        spawn_key = tuple(seed.spawn_key) + tuple(utils.stable_tag(k) for k in keys)
        return np.random.SeedSequence(seed.entropy, spawn_key=spawn_key)
    if not isinstance(seed, Number) or int(seed) != seed or seed < 0:
        raise ValueError(f"seed must be a non negative integer, got {seed}.")
    return np.random.SeedSequence(int(seed),
                                  spawn_key=tuple(utils.stable_tag(k) for k in keys))


def seed_int(seed, *keys):
    """A 32 bit integer drawn from the sub-stream, for APIs wanting ``random_state``."""
    return int(derive_seed(seed, *keys).generate_state(1)[0])


@dataclass(frozen=True)
class Bernoulli:
    p: float

    def __post_init__(self):
        if not 0. <= self.p <= 1.:
            raise ValueError(f"bernoulli p must lie in [0, 1], got {self.p}.")


@dataclass(frozen=True)
class Gaussian:
    mu: float = 0.
    sigma: float = 1.

    def __post_init__(self):
        if not self.sigma >= 0.:
            raise ValueError(f"gaussian sigma must be non negative, got {self.sigma}.")


@dataclass(frozen=True)
class Multinomial:
    weights: tuple

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        if weights.ndim != 1 or weights.size == 0:
            raise ValueError("multinomial weights must be a non empty vector.")
        if np.any(weights < 0):
            raise ValueError(f"multinomial weights must be non negative, got {self.weights}.")
        if abs(weights.sum() - 1.) > 1e-9:
            raise ValueError(f"multinomial weights must sum to 1, got {weights.sum()}.")
        object.__setattr__(self, 'weights', tuple(float(w) for w in weights))


def sample(dist, rng, size=None):
    """Draws from a Bernoulli, Gaussian or Multinomial distribution.

    Args:
      dist: Bernoulli, Gaussian or Multinomial

      rng: numpy.random.Generator or int seed

      size: int or tuple, optional
        None returns a scalar.

    Returns:
      value: scalar or np.ndarray
        0/1 integers for Bernoulli, category indices for Multinomial.
    """
    rng = make_rng(rng)
    if isinstance(dist, Bernoulli):
        return (rng.random(size) < dist.p).astype(np.int64) if size is not None \
            else int(rng.random() < dist.p)
    if isinstance(dist, Gaussian):
        if dist.sigma == 0.:
            return np.full(size, float(dist.mu)) if size is not None else float(dist.mu)
        return dist.mu + dist.sigma * rng.standard_normal(size)
    if isinstance(dist, Multinomial):
        weights = np.asarray(dist.weights)
        weights = weights / weights.sum()
        return rng.choice(weights.size, size=size, p=weights)
    raise ValueError(f"Unknown distribution {dist!r}.")


# Sparse products and eigensolver

def spmv(A, v):
    """Product of a symmetric matrix with a vector (or a stack of vectors)."""
    v = np.asarray(v, dtype=float)
    if v.shape[0] != A.shape[1]:
        raise ValueError(f"Dimension mismatch: matrix has {A.shape[1]} columns, "
                         f"vector has {v.shape[0]} entries.")
    return np.asarray(A @ v)


def _canonical_signs(vectors):
    """Flips each column so that its largest-magnitude entry is positive."""
    if vectors.size == 0:
        return vectors
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.
    return vectors * signs


def _residuals(A, values, vectors):
    return np.linalg.norm(A @ vectors - vectors * values, axis=0)


def _order(values, which):
    key = -np.abs(values) if which == 'abs' else -values
    return np.argsort(key, kind='stable')


def eigs_topk(A, K, which='abs', tol=1e-8, max_iter=None, seed=0):
    """K eigenpairs of a symmetric matrix, largest in absolute or algebraic order.

    Args:
      A: scipy.sparse matrix or np.ndarray of shape (n, n)
        symmetric.

      K: int
        number of eigenpairs, 1 <= K <= n.

      which: str
        'abs' for the largest |eigenvalue|, 'algebraic' for the largest values.

      tol: float
        residual bound relative to max(1, |lambda_1|).

      max_iter: int
        maximal number of Lanczos restarts, defaults to 10 * n.

      seed: int
        seed of the Lanczos starting vector.

    Returns:
      result: scipy.optimize.OptimizeResult
        with fields eigenvalues, eigenvectors, residuals, nit (operator applications,
        0 on the dense path) and success.
    """
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError(f"Matrix must be square, got shape {A.shape}.")
    if not 1 <= K <= n:
        raise ValueError(f"K must lie in [1, {n}], got {K}.")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}.")
    if which not in ('abs', 'algebraic'):
        raise ValueError(f"which must be 'abs' or 'algebraic', got {which}.")
    if max_iter is None:
        max_iter = 10 * n

    nnz = A.nnz if sparse.issparse(A) else np.count_nonzero(A)
    if nnz == 0:
        values = np.zeros(K)
        vectors = np.eye(n)[:, :K]
        return optimize.OptimizeResult(eigenvalues=values, eigenvectors=vectors,
                                       residuals=np.zeros(K), nit=0, success=True)

    nit = 0
    if n <= DENSE_MAX_N or K >= n - 1:
        dense = A.toarray() if sparse.issparse(A) else np.asarray(A, dtype=float)
        all_values, all_vectors = sla.eigh(dense)
        idx = _order(all_values, which)[:K]
        values, vectors = all_values[idx], all_vectors[:, idx]
    else:
        A = sparse.csr_matrix(A, dtype=float)
        counter = [0]

        def matvec(v):
            counter[0] += 1
            return A @ v

        op = spla.LinearOperator((n, n), matvec=matvec, dtype=float)
        v0 = make_rng(seed, 'lanczos').standard_normal(n)
        try:
            values, vectors = spla.eigsh(op, k=K, which='LM' if which == 'abs' else 'LA',
                                         v0=v0, tol=tol, maxiter=max_iter)
        except spla.ArpackNoConvergence as err:
            residuals = _residuals(A, err.eigenvalues, err.eigenvectors)
            raise ConvergenceError(
                f"Lanczos did not converge within {max_iter} iterations: "
                f"{len(err.eigenvalues)} of {K} pairs converged.",
                residuals=residuals) from err
        idx = _order(values, which)
        values, vectors = values[idx], vectors[:, idx]
        nit = counter[0]

    vectors = _canonical_signs(vectors)
    residuals = _residuals(A, values, vectors)
    bound = tol * max(1., abs(values[0]))
    success = bool(np.all(residuals <= bound))
    if not success:
        warnings.warn(f"Eigenpair residuals {residuals.max():.3g} exceed the bound {bound:.3g}.",
                      RuntimeWarning)
    return optimize.OptimizeResult(eigenvalues=values, eigenvectors=vectors, residuals=residuals,
                                   nit=nit, success=success)


def eigs_topk_abs(A, K, tol=1e-8, max_iter=None, seed=0):
    """The K eigenpairs of largest |eigenvalue|, sorted by decreasing |value|.

    Small matrices (n <= 512) use a dense symmetric decomposition, larger ones
    ARPACK's implicitly restarted Lanczos. Eigenvector signs are fixed so that
    the largest-magnitude coordinate of each vector is positive.
    See :func:`eigs_topk` for the arguments.
    """
    return eigs_topk(A, K, which='abs', tol=tol, max_iter=max_iter, seed=seed)


# k-means

def _as_rows(data):
    data = np.asarray(data, dtype=float)
    if data.ndim == 1:
        data = data.reshape(-1, 1)
    if data.ndim != 2:
        raise ValueError(f"data must be 1 or 2 dimensional, got shape {data.shape}.")
    if not np.all(np.isfinite(data)):
        raise ValueError("data must be finite.")
    return data


def lloyd(data, centers, max_iter=300):
    """Lloyd iterations from the given centers.

    A center whose cluster empties keeps its previous position. Stops when the
    assignment no longer changes.

    Args:
      data: np.ndarray of shape (n, d)
      centers: np.ndarray of shape (K, d)
      max_iter: int

    Returns:
      result: scipy.optimize.OptimizeResult
        with fields labels, centers, inertia, history (inertia after each
        assignment, non-increasing) and nit.
    """
    data = _as_rows(data)
    centers = np.array(centers, dtype=float)
    K = centers.shape[0]

    labels = np.argmin(cdist(data, centers, 'sqeuclidean'), axis=1)
    history = [float(np.sum((data - centers[labels]) ** 2))]
    it = 0
    for it in range(1, max_iter + 1):
        counts = np.bincount(labels, minlength=K)
        sums = np.zeros_like(centers)
        np.add.at(sums, labels, data)
        nonempty = counts > 0
        centers[nonempty] = sums[nonempty] / counts[nonempty, None]

        new_labels = np.argmin(cdist(data, centers, 'sqeuclidean'), axis=1)
        history.append(float(np.sum((data - centers[new_labels]) ** 2)))
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels

    return optimize.OptimizeResult(labels=labels, centers=centers, inertia=history[-1],
                                   history=history, nit=it)


def kmeans(data, K, restarts=10, max_iter=300, seed=0):
    """Best-of-restarts k-means with k-means++ seeding.

    Args:
      data: np.ndarray of shape (n, d) or (n,)
      K: int
      restarts: int
      max_iter: int
        maximal number of Lloyd iterations per restart.
      seed: int

    Returns:
      labels: np.ndarray of shape (n,)
        partition of lowest within-cluster sum of squares, ties broken by
        restart index.
    """
    data = _as_rows(data)
    if restarts < 1:
        raise ValueError(f"restarts must be at least 1, got {restarts}.")
    if K > data.shape[0]:
        raise ValueError(f"K={K} exceeds the number of rows {data.shape[0]}.")
    n_distinct = np.unique(data, axis=0).shape[0]
    if K > n_distinct:
        raise DegenerateClusteringError(
            f"Cannot form {K} clusters from {n_distinct} distinct rows.")

    best = None
    for restart in range(restarts):
        centers, _ = kmeans_plusplus(data, K, random_state=seed_int(seed, 'kmeans', restart))
        result = lloyd(data, centers, max_iter=max_iter)
        if best is None or result.inertia < best.inertia:
            best = result
    return best.labels
