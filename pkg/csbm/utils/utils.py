"""
General utility functions.
=========================

Helpers for symmetric sparse matrices and partitions shared by every module.
"""

from numbers import Number
import hashlib

import numpy as np
from scipy import sparse


def from_triplets(n, triplets):
    """Builds a symmetric csr matrix from upper-triangle triplets.

    Args:
      n: int
        number of nodes

      triplets: iterable of (i, j, w) with i <= j
        each off-diagonal triplet fills both (i, j) and (j, i);
        a diagonal triplet is stored once.

    Returns:
      A: scipy.sparse.csr_matrix of shape (n, n)
    """
    triplets = list(triplets)
    if len(triplets) == 0:
        return sparse.csr_matrix((n, n), dtype=float)
    rows, cols, vals = (np.asarray(t) for t in zip(*triplets))
    return symmetric_from_upper(n, rows.astype(np.int64), cols.astype(np.int64),
                                vals.astype(float))


def symmetric_from_upper(n, rows, cols, vals):
    """Symmetric csr matrix from upper-triangle coordinate arrays (rows <= cols)."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals, dtype=float)
    if rows.size and (rows.min() < 0 or cols.max() >= n):
        raise ValueError(f"Indices must lie in [0, {n}).")
    if np.any(rows > cols):
        raise ValueError("Triplets must satisfy i <= j.")
    off = rows != cols
    all_rows = np.concatenate([rows, cols[off]])
    all_cols = np.concatenate([cols, rows[off]])
    all_vals = np.concatenate([vals, vals[off]])
    A = sparse.coo_matrix((all_vals, (all_rows, all_cols)), shape=(n, n)).tocsr()
    if A.nnz != all_vals.size:
        raise ValueError("Duplicate (i, j) entries.")
    A.eliminate_zeros()
    return A


def to_triplets(A):
    """Upper-triangle triplets (i, j, w), i <= j, sorted by (i, j)."""
    upper = sparse.triu(sparse.csr_matrix(A), format='coo')
    order = np.lexsort((upper.col, upper.row))
    return [(int(i), int(j), float(w)) for i, j, w in
            zip(upper.row[order], upper.col[order], upper.data[order])]


def is_symmetric(A, tol=1e-12):
    diff = abs(sparse.csr_matrix(A) - sparse.csr_matrix(A).T)
    return diff.nnz == 0 or diff.max() <= tol


def membership(z, K):
    """Membership matrix Z of shape (n, K) as a csr matrix."""
    z = np.asarray(z)
    n = z.shape[0]
    return sparse.csr_matrix((np.ones(n), (np.arange(n), z)), shape=(n, K))


def normalized_membership(z, K):
    """W = Z D^{-1}: membership with columns scaled by 1 / n_k.

    Empty clusters give empty columns."""
    z = np.asarray(z)
    counts = np.bincount(z, minlength=K).astype(float)
    scale = np.divide(1., counts, out=np.zeros(K), where=counts > 0)
    n = z.shape[0]
    return sparse.csr_matrix((scale[z], (np.arange(n), z)), shape=(n, K))


def cluster_sizes(z, K):
    return np.bincount(np.asarray(z), minlength=K)


def check_labels(z, K=None, n=None):
    """Validates a label vector and returns it as an int array."""
    z = np.asarray(z)
    if z.ndim != 1:
        raise ValueError(f"labels must be one dimensional, got shape {z.shape}.")
    if z.size and not np.issubdtype(z.dtype, np.integer):
        if not np.all(np.mod(z, 1) == 0):
            raise ValueError("labels must be integers.")
    z = z.astype(np.int64)
    if n is not None and z.shape[0] != n:
        raise ValueError(f"Expected {n} labels, got {z.shape[0]}.")
    if z.size and z.min() < 0:
        raise ValueError("labels must be non negative.")
    if K is not None and z.size and z.max() >= K:
        raise ValueError(f"labels must be smaller than K={K}, got {z.max()}.")
    return z


def stable_tag(tag):
    """Maps a purpose tag (str or int) to a stable 32 bit integer."""
    if isinstance(tag, Number):
        return int(tag)
    digest = hashlib.blake2b(str(tag).encode('utf-8'), digest_size=4).digest()
    return int.from_bytes(digest, 'little')


def power_iteration(mat, n_iter: int=100, tol: float=1e-6, seed=0):
    """
    Estimates the spectral norm of a symmetric matrix, and the associated
    eigenvector.

    Args:
      mat: scipy.sparse matrix or np.ndarray of shape (n, n)
      n_iter: int
        maximal number of iterations to perform
      tol: float
        relative change of the estimate at which to stop.
      seed: int
        seed of the random starting vector

    Returns:
      sigma: float
        estimate of max |eigenvalue|
      v: np.ndarray of shape (n,)
    """
    if n_iter < 1 or type(n_iter) != int:
        raise ValueError("n_iter must be a positive integer.")
    n = mat.shape[0]
    # Random start so that the first eigenvector
    # is not orthogonal to the initial vector
    v_k = np.random.default_rng(seed).standard_normal(n)
    v_k /= np.linalg.norm(v_k)
    sigma_k = 0.
    for _ in range(n_iter):
        u_k = mat @ v_k
        norm_u = np.linalg.norm(u_k)
        if norm_u == 0.:
            return 0., v_k
        sigma_next = norm_u
        v_k = u_k / norm_u
        if abs(sigma_next - sigma_k) <= tol * sigma_next:
            sigma_k = sigma_next
            break
        sigma_k = sigma_next
    return float(sigma_k), v_k
