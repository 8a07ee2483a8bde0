"""Randomized rounding of an SDP solution to a k-sparse unit vector.

Each trial samples a support S by independent Bernoulli draws whose
probabilities mix the SDP diagonal with the matrix diagonal, then takes the
top eigenvector of the principal block A[S, S]. The probabilities are built
so that E|S| <= (3/4) k, which makes the event |S| <= k overwhelmingly
likely, and a multi-trial wrapper keeps the best feasible candidate, seeded
by a greedy initializer that is always feasible.
"""

from dataclasses import dataclass, field

import numpy as np

from .linalg import check_symmetric, principal_submatrix, top_eigpair

# Diagonal entries of W this slightly negative are treated as roundoff
# zeros; anything lower is rejected.
_DIAG_CLAMP = -1e-12

# PSD test threshold, relative to the spectral norm.
_PSD_TOL = 1e-9

GREEDY_TRIAL_ID = 0


@dataclass
class RoundingProbabilities:
    """Per-index Bernoulli probabilities for support sampling.

    p_i = min{1, (2/3) k a_i / sum_j a_j + (1/12) k A_ii / tr(A)} with
    a_i = sqrt(W_ii). The construction guarantees sum_i p_i <= (3/4) k,
    which is asserted here.
    """

    p: np.ndarray
    k: int
    source_trace: float
    source_diag_sqrt_sum: float

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        if np.any(self.p < 0.0) or np.any(self.p > 1.0):
            raise ValueError("probabilities must lie in [0, 1]")
        budget = 0.75 * self.k
        if float(self.p.sum()) > budget + 1e-9 * max(1.0, budget):
            raise ValueError(
                f"probability budget violated: sum p = {float(self.p.sum()):.6f} "
                f"> 0.75 k = {budget:.6f}"
            )


@dataclass
class SparseSolution:
    """A unit vector supported on at most k coordinates, plus bookkeeping."""

    z: np.ndarray
    support: tuple[int, ...]
    k: int
    objective: float
    feasible: bool
    trial_id: int = field(default=GREEDY_TRIAL_ID)


def rounding_probabilities(A: np.ndarray, W: np.ndarray, k: int) -> RoundingProbabilities:
    """Build the sampling probabilities from (A, W, k).

    Requires tr(A) > 0, a not-identically-zero diagonal of W, and diagonal
    entries of A and W that are nonnegative up to roundoff.
    """
    A = check_symmetric(A)
    W = check_symmetric(W, tol=1e-8)
    d = A.shape[0]
    if W.shape[0] != d:
        raise ValueError("A and W must have matching shape")
    if not 1 <= k <= d:
        raise ValueError(f"k must satisfy 1 <= k <= {d}, got {k}")
    trace_A = float(np.trace(A))
    if trace_A <= 0.0:
        raise ValueError(f"tr(A) must be positive, got {trace_A:.3e}")
    diag_A = np.diag(A).copy()
    if np.any(diag_A < _DIAG_CLAMP * max(1.0, float(np.max(np.abs(diag_A))))):
        raise ValueError("A has a materially negative diagonal entry")
    diag_A = np.clip(diag_A, 0.0, None)
    diag_W = np.diag(W).copy()
    scale_W = max(1.0, float(np.max(np.abs(diag_W))))
    if np.any(diag_W < _DIAG_CLAMP * scale_W):
        raise ValueError(
            f"W has a materially negative diagonal entry "
            f"({float(diag_W.min()):.3e})"
        )
    diag_W = np.clip(diag_W, 0.0, None)
    a = np.sqrt(diag_W)
    a_sum = float(a.sum())
    if a_sum == 0.0:
        raise ValueError("diagonal of W is identically zero")
    p = np.minimum(1.0, (2.0 / 3.0) * k * a / a_sum + (1.0 / 12.0) * k * diag_A / trace_A)
    return RoundingProbabilities(p=p, k=k, source_trace=trace_A, source_diag_sqrt_sum=a_sum)


def _trial_rng(seed: int, trial: int, dim: int) -> np.random.Generator:
    """Counter-based stream for one trial: depends only on (seed, trial).

    Philox lets us jump the counter by a fixed stride per trial, so trials
    are independent and the result does not depend on evaluation order.
    """
    bg = np.random.Philox(key=seed % (1 << 64))
    # Each counter increment yields four 64-bit words; a stride of dim
    # comfortably covers the dim uniforms one trial consumes.
    bg = bg.advance(trial * max(dim, 1))
    return np.random.Generator(bg)


def sample_support(p: np.ndarray, seed: int, trial: int = 0) -> np.ndarray:
    """Sample S = {i : eps_i = 1} with independent eps_i ~ Bernoulli(p_i).

    Deterministic in (p, seed, trial); returned indices are sorted.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p < 0.0) or np.any(p > 1.0):
        raise ValueError("probabilities must lie in [0, 1]")
    rng = _trial_rng(seed, trial, p.size)
    u = rng.random(p.size)
    return np.nonzero(u < p)[0]


def is_psd(A: np.ndarray, tol: float = _PSD_TOL) -> bool:
    """Whether min eig(A) >= -tol * ||A||_2, via one extreme eigenpair."""
    A = check_symmetric(A)
    top = top_eigpair(A).value
    neg = top_eigpair(-A).value  # = -lambda_min
    spectral = max(abs(top), abs(neg))
    return -neg >= -tol * max(spectral, 1e-300)


def _solution_from_support(
    A: np.ndarray, S: np.ndarray, k: int, trial_id: int
) -> SparseSolution:
    d = A.shape[0]
    block = principal_submatrix(A, S)
    val, y = top_eigpair(block)
    z = np.zeros(d)
    z[S] = y
    return SparseSolution(
        z=z,
        support=tuple(int(i) for i in S),
        k=k,
        objective=float(val),
        feasible=S.size <= k,
        trial_id=trial_id,
    )


def _pad_support(S: np.ndarray, diag_W: np.ndarray, k: int) -> np.ndarray:
    """Grow S to size k with the largest W_ii outside S, ties to lower index."""
    need = k - S.size
    mask = np.ones(diag_W.size, dtype=bool)
    mask[S] = False
    outside = np.nonzero(mask)[0]
    # Stable sort on negated values: equal diagonals fall back to index order.
    order = np.argsort(-diag_W[outside], kind="stable")
    extra = outside[order[:need]]
    return np.sort(np.concatenate([S, extra]))


def round_once(
    A: np.ndarray,
    W: np.ndarray,
    k: int,
    seed: int,
    trial: int = 1,
    probs: RoundingProbabilities | None = None,
    A_is_psd: bool | None = None,
) -> SparseSolution:
    """One randomized rounding trial.

    When A is PSD and the sampled support falls short of size k, the support
    is padded with the largest remaining W_ii, so the trial is feasible
    whenever |S| <= k held at sampling time. For indefinite A no padding is
    performed; an empty sample yields an infeasible zero solution, and an
    oversized sample is returned with feasible=False so callers can drop it.
    """
    A = check_symmetric(A)
    W = check_symmetric(W, tol=1e-8)
    if probs is None:
        probs = rounding_probabilities(A, W, k)
    if A_is_psd is None:
        A_is_psd = is_psd(A)
    S = sample_support(probs.p, seed, trial)
    diag_W = np.clip(np.diag(W), 0.0, None)
    if A_is_psd and S.size < k:
        S = _pad_support(S, diag_W, k)
    if S.size == 0:
        return SparseSolution(
            z=np.zeros(A.shape[0]),
            support=(),
            k=k,
            objective=0.0,
            feasible=False,
            trial_id=trial,
        )
    return _solution_from_support(A, S, k, trial_id=trial)


def greedy_diagonal_init(A: np.ndarray, W: np.ndarray, k: int) -> SparseSolution:
    """Deterministic initializer: top eigenvector of the block on the k
    largest diagonal entries of W (ties broken toward the lower index).

    Always feasible, so the multi-trial wrapper never returns empty-handed.
    """
    A = check_symmetric(A)
    W = check_symmetric(W, tol=1e-8)
    d = A.shape[0]
    if not 1 <= k <= d:
        raise ValueError(f"k must satisfy 1 <= k <= {d}, got {k}")
    order = np.argsort(-np.diag(W), kind="stable")
    S = np.sort(order[:k])
    return _solution_from_support(A, S, k, trial_id=GREEDY_TRIAL_ID)


def multi_round(
    A: np.ndarray,
    W: np.ndarray,
    k: int,
    n_trials: int,
    seed: int,
    collect: bool = False,
) -> SparseSolution | tuple[SparseSolution, np.ndarray]:
    """Best of the greedy initializer and n_trials rounding trials.

    Infeasible trials are discarded. Ties on the objective resolve to the
    lowest trial id (the greedy initializer is id 0, trials are 1..N), so
    the result is deterministic in (A, W, k, n_trials, seed). With
    collect=True also returns the per-trial objective array, with NaN
    marking infeasible trials (index 0 is the initializer).
    """
    if n_trials < 0:
        raise ValueError("n_trials must be >= 0")
    best = greedy_diagonal_init(A, W, k)
    objectives = np.full(n_trials + 1, np.nan)
    objectives[0] = best.objective
    if n_trials > 0:
        probs = rounding_probabilities(A, W, k)
        psd = is_psd(A)
        for trial in range(1, n_trials + 1):
            cand = round_once(A, W, k, seed, trial=trial, probs=probs, A_is_psd=psd)
            if not cand.feasible:
                continue
            objectives[trial] = cand.objective
            if cand.objective > best.objective:
                best = cand
    if collect:
        return best, objectives
    return best
