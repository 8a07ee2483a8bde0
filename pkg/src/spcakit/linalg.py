"""Shared dense/iterative linear algebra kernels.

Everything downstream (the SDP solver, the rounding scheme, the baselines,
the certificate checkers) funnels its eigen and projection work through this
module so that tolerances and tie-breaking live in exactly one place.
"""

from typing import NamedTuple, Sequence

import numpy as np

# Above this dimension top_eigpair switches from a dense eigensolve to
# Lanczos with full reorthogonalization.
DENSE_EIG_MAX_DIM = 400

# full_eigendecomposition refuses matrices larger than this.
FULL_EIG_MAX_DIM = 4096

SYMMETRY_TOL = 1e-12


class EigenSolverError(RuntimeError):
    """Iterative eigensolver failed to converge; carries the best residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (best residual {residual:.3e})")
        self.residual = residual


class EigenPair(NamedTuple):
    value: float
    vector: np.ndarray


def check_symmetric(M: np.ndarray, tol: float = SYMMETRY_TOL) -> np.ndarray:
    """Validate a square real matrix and return its symmetrized copy.

    Asymmetry up to ``tol`` (relative to the largest entry, with an absolute
    floor of 1) is silently repaired via (M + M.T) / 2; anything larger is an
    error, as is any non-finite entry.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix contains non-finite entries")
    scale = max(1.0, float(np.max(np.abs(M))) if M.size else 1.0)
    gap = float(np.max(np.abs(M - M.T))) if M.size else 0.0
    if gap > tol * scale:
        raise ValueError(
            f"matrix is not symmetric: max asymmetry {gap:.3e} exceeds "
            f"tolerance {tol * scale:.3e}"
        )
    return (M + M.T) / 2.0


def _fix_sign(v: np.ndarray) -> np.ndarray:
    """Flip v so its first nonzero component is positive (deterministic sign)."""
    scale = float(np.max(np.abs(v)))
    if scale == 0.0:
        return v
    idx = np.nonzero(np.abs(v) > 1e-14 * scale)[0]
    if idx.size and v[idx[0]] < 0:
        return -v
    return v


def _lanczos_top(
    M: np.ndarray, tol: float, seed: int, max_iter: int
) -> tuple[float, np.ndarray, float]:
    """One Lanczos run with full reorthogonalization.

    Returns (theta, ritz_vector, residual) for the algebraically largest
    Ritz pair found, converged or not.
    """
    d = M.shape[0]
    rng = np.random.default_rng(seed)
    q = rng.standard_normal(d)
    q /= np.linalg.norm(q)
    Q = np.empty((d, min(max_iter, d)), dtype=float)
    alphas: list[float] = []
    betas: list[float] = []
    norm_proxy = 1.0
    best: tuple[float, np.ndarray, float] | None = None
    for j in range(Q.shape[1]):
        Q[:, j] = q
        w = M @ q
        a = float(q @ w)
        alphas.append(a)
        w -= a * q
        if j > 0:
            w -= betas[-1] * Q[:, j - 1]
        # Full reorthogonalization keeps Ritz values honest for the
        # clustered spectra the SDP iterates produce.
        w -= Q[:, : j + 1] @ (Q[:, : j + 1].T @ w)
        b = float(np.linalg.norm(w))
        T = np.diag(alphas)
        if betas:
            off = np.array(betas)
            T += np.diag(off, 1) + np.diag(off, -1)
        theta_all, S = np.linalg.eigh(T)
        theta = float(theta_all[-1])
        norm_proxy = max(norm_proxy, float(np.max(np.abs(theta_all))))
        # Cheap residual estimate for the top Ritz pair.
        est = abs(b * S[-1, -1])
        if est <= tol * norm_proxy or b <= 1e-14 * norm_proxy or j == Q.shape[1] - 1:
            v = Q[:, : j + 1] @ S[:, -1]
            v /= np.linalg.norm(v)
            res = float(np.linalg.norm(M @ v - theta * v))
            if best is None or res < best[2]:
                best = (theta, v, res)
            if res <= tol * norm_proxy:
                return best
            if b <= 1e-14 * norm_proxy:
                return best
        betas.append(b)
        q = w / b
    assert best is not None
    return best


def top_eigpair(M: np.ndarray, tol: float = 1e-9, seed: int = 0) -> EigenPair:
    """Largest (algebraic) eigenvalue and a unit eigenvector of symmetric M.

    Dense path for dim <= DENSE_EIG_MAX_DIM, Lanczos with full
    reorthogonalization above, capped at 10 * dim iterations with one
    restart. The eigenvector sign is fixed so its first nonzero component
    is positive. Raises EigenSolverError when the iterative path fails to
    reach residual tol * ||M||.
    """
    M = check_symmetric(M)
    d = M.shape[0]
    if d == 0:
        raise ValueError("empty matrix has no eigenpairs")
    if d <= DENSE_EIG_MAX_DIM:
        vals, vecs = np.linalg.eigh(M)
        return EigenPair(float(vals[-1]), _fix_sign(vecs[:, -1]))
    # Full reorthogonalization exhausts the Krylov space after d steps,
    # which is well inside the 10 * d iteration policy cap.
    max_iter = min(10 * d, d)
    theta, v, res = _lanczos_top(M, tol, seed, max_iter)
    norm_proxy = max(1.0, abs(theta))
    if res > tol * norm_proxy:
        # One restart from a fresh starting vector before giving up.
        theta2, v2, res2 = _lanczos_top(M, tol, seed + 1, max_iter)
        if res2 < res:
            theta, v, res = theta2, v2, res2
        if res > tol * max(1.0, abs(theta)):
            raise EigenSolverError("Lanczos failed to converge", res)
    return EigenPair(float(theta), _fix_sign(v))


def full_eigendecomposition(M: np.ndarray) -> list[EigenPair]:
    """All eigenpairs of symmetric M, sorted by descending eigenvalue."""
    M = check_symmetric(M)
    if M.shape[0] > FULL_EIG_MAX_DIM:
        raise ValueError(
            f"dimension {M.shape[0]} exceeds full-decomposition cap {FULL_EIG_MAX_DIM}"
        )
    vals, vecs = np.linalg.eigh(M)
    return [
        EigenPair(float(vals[i]), _fix_sign(vecs[:, i]))
        for i in range(len(vals) - 1, -1, -1)
    ]


def matrix_sqrt(W: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition.

    Roundoff-negative eigenvalues down to -1e-10 * ||W||_2 are clamped to
    zero; anything more negative means the input is materially indefinite
    and is rejected.
    """
    W = check_symmetric(W)
    vals, vecs = np.linalg.eigh(W)
    spec = float(np.max(np.abs(vals))) if vals.size else 0.0
    floor = -1e-10 * spec
    if np.any(vals < floor):
        raise ValueError(
            f"matrix is not PSD: most negative eigenvalue {float(vals.min()):.3e}"
        )
    root = vecs @ np.diag(np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T
    return (root + root.T) / 2.0


def matrix_norm(M: np.ndarray, kind: str) -> float:
    """Matrix norms used throughout: entrywise l1/linf, Frobenius, spectral.

    'entry_l1' and 'entry_inf' treat M as a long vector (these are the
    norms the SDP's l1 budget and the perturbation bounds speak about, not
    the induced operator norms). 'spectral' goes through top_eigpair on M
    and -M so the iterative path is exercised for large inputs.
    """
    M = np.asarray(M, dtype=float)
    if kind == "entry_l1":
        return float(np.sum(np.abs(M)))
    if kind == "entry_inf":
        return float(np.max(np.abs(M))) if M.size else 0.0
    if kind == "frobenius":
        return float(np.linalg.norm(M))
    if kind == "spectral":
        hi = top_eigpair(M).value
        lo = top_eigpair(-M).value
        return max(abs(hi), abs(lo))
    raise ValueError(f"unknown norm kind {kind!r}")


def principal_submatrix(M: np.ndarray, support: Sequence[int]) -> np.ndarray:
    """M[S, S] for a strictly increasing index set S (0-based)."""
    M = np.asarray(M, dtype=float)
    S = np.asarray(support, dtype=int)
    if S.ndim != 1 or S.size == 0:
        raise ValueError("support must be a nonempty 1-d index sequence")
    if np.any(S < 0) or np.any(S >= M.shape[0]):
        raise ValueError("support index out of range")
    if np.any(np.diff(S) <= 0):
        raise ValueError("support must be strictly increasing (sorted, unique)")
    return M[np.ix_(S, S)]


def project_l1_ball(x: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection of x onto the l1 ball of the given radius.

    Sort-and-scan soft threshold: O(n log n), exact up to roundoff.
    Points already inside the ball are returned unchanged (as a copy).
    """
    if radius < 0:
        raise ValueError("l1 radius must be nonnegative")
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    if radius == 0.0:
        return np.zeros_like(x)
    a = np.abs(flat)
    if a.sum() <= radius:
        return x.copy()
    u = np.sort(a)[::-1]
    css = np.cumsum(u)
    j = np.arange(1, u.size + 1)
    rho = np.nonzero(u * j > css - radius)[0][-1]
    tau = (css[rho] - radius) / float(rho + 1)
    out = np.sign(flat) * np.maximum(a - tau, 0.0)
    return out.reshape(x.shape)
