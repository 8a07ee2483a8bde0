"""Matrix loading and writing for the command line tools."""

import numpy as np
import scipy.io
import scipy.sparse

from .linalg import check_symmetric

FORMATS = ("csv", "matrix_market", "gram_of_rows")


def load_matrix(path: str, format: str = "csv", center: bool = False) -> np.ndarray:
    """Load a symmetric matrix from disk.

    'csv' and 'matrix_market' expect the matrix itself, square and
    symmetric within 1e-8 (it is symmetrized on the way in). 'gram_of_rows'
    expects a CSV table of n observation rows and returns X^T X, optionally
    centering the columns first. Non-finite entries are rejected.
    """
    if format not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {format!r}")
    if format == "matrix_market":
        M = scipy.io.mmread(path)
        M = np.asarray(M.todense() if scipy.sparse.issparse(M) else M, dtype=float)
    else:
        M = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{path}: non-finite entries")
    if format == "gram_of_rows":
        X = M
        if center:
            X = X - X.mean(axis=0, keepdims=True)
        M = X.T @ X
    return check_symmetric(M, tol=1e-8)


def save_matrix(A: np.ndarray, path: str, format: str = "csv") -> None:
    """Write a matrix as CSV or Matrix Market, by file content not name."""
    if format == "csv":
        np.savetxt(path, A, delimiter=",", fmt="%.17g")
    elif format == "matrix_market":
        scipy.io.mmwrite(path, np.asarray(A))
    else:
        raise ValueError(f"unsupported output format {format!r}")
