"""Shared test oracles, implemented independently of the package internals.

Everything here is deliberately naive: cyclic Jacobi instead of LAPACK-style
eigensolvers, bisection instead of the sort-and-scan projection, explicit
support enumeration instead of the packaged brute force.  Slow but transparent,
so the main library can be checked against code with no shared failure modes.
"""

from __future__ import annotations

import itertools

import numpy as np


def jacobi_eigh(M: np.ndarray, sweeps: int = 60, tol: float = 1e-13):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns (values, vectors) sorted descending, vectors in columns.
    """
    A = np.array(M, dtype=float)
    d = A.shape[0]
    V = np.eye(d)
    for _ in range(sweeps):
        off = 0.0
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                off = max(off, abs(apq))
                if abs(apq) <= tol * max(1.0, abs(A[p, p]), abs(A[q, q])):
                    continue
                # classic 2x2 rotation angle
                theta = 0.5 * np.arctan2(2.0 * apq, A[q, q] - A[p, p])
                c, s = np.cos(theta), np.sin(theta)
                J = np.eye(d)
                J[p, p] = c
                J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                A = J.T @ A @ J
                V = V @ J
        if off <= tol:
            break
    vals = np.diag(A).copy()
    order = np.argsort(vals)[::-1]
    return vals[order], V[:, order]


def project_l1_oracle(v: np.ndarray, radius: float) -> np.ndarray:
    """l1-ball projection by bisection on the soft threshold."""
    v = np.asarray(v, dtype=float)
    if radius == 0.0:
        return np.zeros_like(v)
    if np.abs(v).sum() <= radius:
        return v.copy()
    lo, hi = 0.0, np.abs(v).max()
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.maximum(np.abs(v) - mid, 0.0).sum() > radius:
            lo = mid
        else:
            hi = mid
    theta = 0.5 * (lo + hi)
    return np.sign(v) * np.maximum(np.abs(v) - theta, 0.0)


def random_psd(rng: np.random.Generator, d: int, rank: int | None = None,
               scale: float = 1.0) -> np.ndarray:
    """Random PSD matrix with controllable rank."""
    r = d if rank is None else rank
    G = rng.standard_normal((d, r))
    return scale * (G @ G.T) / r


def random_feasible_w(rng: np.random.Generator, d: int, k: int,
                      rank: int | None = None) -> np.ndarray:
    """Random PSD W with trace 1 and entrywise l1 norm at most k.

    Rejection-free: blend a trace-1 PSD matrix toward its own diagonal, whose
    l1 norm equals its trace, until the entrywise budget holds.
    """
    W = random_psd(rng, d, rank=rank)
    W = W / np.trace(W)
    l1 = np.abs(W).sum()
    if l1 <= k:
        return W
    # blend with a diagonal trace-1 matrix, which has minimal l1 for its trace
    D = np.diag(np.diag(W)) / np.diag(W).sum()
    t = (k - 1e-9 - np.abs(D).sum()) / (l1 - np.abs(D).sum())
    t = min(max(t, 0.0), 1.0)
    return D + t * (W - D)


def brute_force_reference(A: np.ndarray, k: int) -> float:
    """Exhaustive sparse-eigenvalue oracle via numpy on every support size."""
    d = A.shape[0]
    best = -np.inf
    for size in range(1, k + 1):
        for S in itertools.combinations(range(d), size):
            sub = A[np.ix_(S, S)]
            best = max(best, float(np.linalg.eigvalsh(sub)[-1]))
    return best
