"""Conditional-gradient augmented-Lagrangian solver for the sparse PCA SDP.

The relaxation being solved is

    maximize    tr(A W)
    subject to  tr(W) = 1,  W >= 0 (PSD),  sum_ij |W_ij| <= k.

The trace-one PSD constraint is kept exact by building W as a convex
combination of rank-one atoms v v^T; the entrywise l1 budget is handled by
an augmented Lagrangian with a dual matrix Y and a growing smoothing
parameter beta_t. Each iteration costs one top-eigenvector call plus one
l1-ball projection, so the iterate after m steps has rank at most m.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .linalg import check_symmetric, project_l1_ball, top_eigpair

# Squared Frobenius diameter of the trace-one spectrahedron (attained by a
# pair of orthogonal rank-one matrices), used in the dual step-size rule.
_DIAM_SQ = 2.0


@dataclass
class CgalConfig:
    """Knobs for solve_spca_sdp.

    dual_norm_cap of None means 100 * ||A||_F, resolved at solve time.
    """

    iterations: int = 100
    lambda0: float = 1.0
    seed: int = 0
    dual_norm_cap: float | None = None
    lmo_tol: float = 1e-9

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.lambda0 <= 0:
            raise ValueError("lambda0 must be positive")
        if self.dual_norm_cap is not None and self.dual_norm_cap <= 0:
            raise ValueError("dual_norm_cap must be positive when given")
        if self.lmo_tol <= 0:
            raise ValueError("lmo_tol must be positive")


@dataclass
class SdpSolution:
    W: np.ndarray
    objective: float
    trace_residual: float
    l1_residual: float
    iterations_run: int
    rank_bound: int
    elapsed_seconds: float = field(default=0.0, repr=False)


def feasibility_residuals(W: np.ndarray, k: int) -> dict[str, float]:
    """Exact constraint residuals of a candidate W for sparsity budget k."""
    W = check_symmetric(W, tol=1e-8)
    trace_residual = abs(float(np.trace(W)) - 1.0)
    l1_residual = max(0.0, float(np.sum(np.abs(W))) - float(k))
    min_eig = -top_eigpair(-W).value
    return {
        "trace_residual": trace_residual,
        "l1_residual": l1_residual,
        "min_eigenvalue": float(min_eig),
    }


def holder_upper_bound(A: np.ndarray, k: int) -> float:
    """Upper bound k * max_i A_ii on the SDP value for PSD A.

    For PSD A the largest entry in absolute value sits on the diagonal, so
    tr(A W) <= ||W||_1 * ||A||_inf <= k * max_i A_ii for any feasible W.
    A negative diagonal entry certifies A is not PSD and is rejected.
    """
    A = check_symmetric(A)
    diag = np.diag(A)
    if np.any(diag < 0):
        raise ValueError(
            f"matrix has a negative diagonal entry ({float(diag.min()):.3e}); "
            "the bound requires PSD input"
        )
    if k < 1:
        raise ValueError("k must be >= 1")
    return float(k) * float(diag.max())


def _project_entrywise_l1(M: np.ndarray, radius: float) -> np.ndarray:
    return project_l1_ball(M, radius)


def solve_spca_sdp(A: np.ndarray, k: int, config: CgalConfig | None = None) -> SdpSolution:
    """Approximately solve the sparse PCA SDP relaxation.

    Deterministic for a fixed (A, k, config). The returned objective and
    residuals are computed exactly on the returned W. rank(W) is at most
    iterations_run because each step mixes in a single rank-one atom.
    """
    if config is None:
        config = CgalConfig()
    A = check_symmetric(A)
    d = A.shape[0]
    if not 1 <= k <= d:
        raise ValueError(f"k must satisfy 1 <= k <= {d}, got {k}")
    t0 = time.perf_counter()
    lam0 = config.lambda0
    cap = config.dual_norm_cap
    if cap is None:
        cap = 100.0 * float(np.linalg.norm(A))
    radius = float(k)

    W = np.zeros((d, d))
    Y = np.zeros((d, d))
    for t in range(1, config.iterations + 1):
        beta = lam0 * np.sqrt(t + 1.0)
        eta = 2.0 / (t + 1.0)
        slack = _project_entrywise_l1(W + Y / beta, radius)
        grad = -A + Y + beta * (W - slack)
        # Linear minimization over the spectrahedron: the minimizing atom is
        # v v^T for the top eigenvector v of -grad.
        v = top_eigpair(-grad, tol=config.lmo_tol, seed=config.seed * 7919 + t).vector
        W *= 1.0 - eta
        W += eta * np.outer(v, v)
        # Dual ascent on the l1 budget, with the step size capped so the
        # bounded-dual analysis applies; skip entirely if the cap on ||Y||
        # would be violated.
        beta_next = lam0 * np.sqrt(t + 2.0)
        residual = W - _project_entrywise_l1(W + Y / beta_next, radius)
        rsq = float(np.sum(residual * residual))
        if rsq > 0.0:
            gamma = min(lam0, beta_next * eta * eta * _DIAM_SQ / rsq)
            Y_next = Y + gamma * residual
            if float(np.linalg.norm(Y_next)) <= cap:
                Y = Y_next

    W = (W + W.T) / 2.0
    objective = float(np.sum(A * W))
    trace_residual = abs(float(np.trace(W)) - 1.0)
    l1_residual = max(0.0, float(np.sum(np.abs(W))) - radius)
    return SdpSolution(
        W=W,
        objective=objective,
        trace_residual=trace_residual,
        l1_residual=l1_residual,
        iterations_run=config.iterations,
        rank_bound=min(config.iterations, d),
        elapsed_seconds=time.perf_counter() - t0,
    )
