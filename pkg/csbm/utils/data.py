"""
Data loading utilities.
=======================

Readers and writers for edge lists, covariates, labels, experiment configs
and results. Every writer replaces its target atomically; reals are written
with 17 significant digits so that a write followed by a read reproduces the
data exactly.
"""

import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd
from easydict import EasyDict

from csbm.utils import utils


RESULT_COLUMNS = ['sweep_param', 'sweep_value', 'run', 'algo', 'seed', 'nmi',
                  'error_rate', 'iters', 'converged', 'wall_time_ms']

FLOAT_FORMAT = '%.17g'


class InputFormatError(ValueError):
    """Malformed input file; the message starts with ``<path>:<line>``."""


def default_file_mode():
    """Mode ``open`` would give a new file under the current umask."""
    umask = os.umask(0)
    os.umask(umask)
    return 0o666 & ~umask


def atomic_write(path, text):
    """Writes text to path through a temporary file in the same directory.

    The result gets the usual permissions of a new file rather than the
    owner-only mode of the temporary file.
    """
    path = Path(path)
    directory = path.parent if str(path.parent) else Path('.')
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        os.chmod(tmp, default_file_mode())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def _format_real(value):
    return FLOAT_FORMAT % value


# Edge lists

def write_edges(path, A):
    """Writes the upper triangle of a symmetric matrix as ``i<TAB>j<TAB>w`` lines."""
    lines = [f"# n={A.shape[0]}"]
    lines += [f"{i}\t{j}\t{_format_real(w)}" for i, j, w in utils.to_triplets(A)]
    atomic_write(path, "\n".join(lines) + "\n")


def read_edges(path):
    """Reads an edge list written by :func:`write_edges`.

    Returns:
      A: scipy.sparse.csr_matrix of shape (n, n)

    Raises:
      InputFormatError: missing ``# n=`` header, malformed line, index out
        of range, i > j, zero weight or duplicate pair.
    """
    n = None
    triplets = []
    seen = set()
    with open(path, 'r', encoding='utf-8') as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith('#'):
                key, _, value = line[1:].strip().partition('=')
                if n is None and key.strip() == 'n':
                    try:
                        n = int(value)
                    except ValueError:
                        raise InputFormatError(f"{path}:{lineno}: invalid header {line!r}") from None
                    if n < 0:
                        raise InputFormatError(f"{path}:{lineno}: negative n in header")
                continue
            if n is None:
                raise InputFormatError(f"{path}:{lineno}: edge before the '# n=<count>' header")
            fields = line.split('\t')
            if len(fields) != 3:
                raise InputFormatError(f"{path}:{lineno}: expected 'i<TAB>j<TAB>w', got {line!r}")
            try:
                i, j, w = int(fields[0]), int(fields[1]), float(fields[2])
            except ValueError:
                raise InputFormatError(f"{path}:{lineno}: cannot parse {line!r}") from None
            if not (0 <= i < n and 0 <= j < n):
                raise InputFormatError(f"{path}:{lineno}: index out of range [0, {n})")
            if i > j:
                raise InputFormatError(f"{path}:{lineno}: expected i <= j, got {i} > {j}")
            if w == 0 or not np.isfinite(w):
                raise InputFormatError(f"{path}:{lineno}: weight must be finite and nonzero")
            if (i, j) in seen:
                raise InputFormatError(f"{path}:{lineno}: duplicate edge ({i}, {j})")
            seen.add((i, j))
            triplets.append((i, j, w))
    if n is None:
        raise InputFormatError(f"{path}:1: missing '# n=<count>' header")
    return utils.from_triplets(n, triplets)


# Covariates

def write_covariates(path, X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    frame = pd.DataFrame(X, columns=[f"x{k + 1}" for k in range(X.shape[1])])
    atomic_write(path, frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n'))


def read_covariates(path):
    """Reads a covariate CSV with header ``x1,...,xd``.

    Returns:
      X: np.ndarray of shape (n, d)
    """
    try:
        frame = pd.read_csv(path, float_precision='round_trip')
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as err:
        raise InputFormatError(f"{path}:1: {err}") from None
    expected = [f"x{k + 1}" for k in range(frame.shape[1])]
    if list(frame.columns) != expected:
        raise InputFormatError(f"{path}:1: expected header {','.join(expected)}")
    for column in frame.columns:
        values = pd.to_numeric(frame[column], errors='coerce')
        bad = np.flatnonzero(values.isna().to_numpy())
        if bad.size:
            raise InputFormatError(f"{path}:{bad[0] + 2}: non numeric value in column {column}")
    return frame.to_numpy(dtype=float)


# Labels

def write_labels(path, z):
    z = utils.check_labels(z)
    atomic_write(path, "".join(f"{label}\n" for label in z))


def read_labels(path, K=None):
    labels = []
    with open(path, 'r', encoding='utf-8') as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                label = int(line)
            except ValueError:
                raise InputFormatError(f"{path}:{lineno}: not an integer label: {line!r}") from None
            if label < 0 or (K is not None and label >= K):
                raise InputFormatError(f"{path}:{lineno}: label {label} out of range")
            labels.append(label)
    return np.asarray(labels, dtype=np.int64)


# Configs and results

def read_config(path):
    """Loads a JSON config into an EasyDict."""
    with open(path, 'r', encoding='utf-8') as f:
        text = f.read()
    try:
        return EasyDict(json.loads(text))
    except json.JSONDecodeError as err:
        raise InputFormatError(f"{path}:{err.lineno}: {err.msg} (column {err.colno})") from None


def records_frame(records):
    """DataFrame with one row per RunRecord, in :data:`RESULT_COLUMNS` order."""
    rows = [record.as_row() for record in records]
    return pd.DataFrame(rows, columns=RESULT_COLUMNS)


def _frame_to_csv(frame):
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    return buffer.getvalue()


def write_results(path, records):
    atomic_write(path, _frame_to_csv(records_frame(records)))


def read_results(path):
    frame = pd.read_csv(path, float_precision='round_trip', keep_default_na=False,
                        dtype={'sweep_param': str, 'algo': str})
    if list(frame.columns) != RESULT_COLUMNS:
        raise InputFormatError(f"{path}:1: expected header {','.join(RESULT_COLUMNS)}")
    return frame


def write_frame(path, frame):
    atomic_write(path, _frame_to_csv(frame))


def summary_path(out):
    """``results.csv`` -> ``results.summary.csv``."""
    return Path(out).with_suffix('.summary.csv')
