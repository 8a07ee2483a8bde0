"""Spiked-covariance data model with bounded adversarial perturbation.

The generator draws n rows B = G Sigma^{1/2} with i.i.d. unit-variance
noise G, Sigma = sigma2 * I + spike_gap * v v^T for a k-sparse unit spike
v, plus an adversarial matrix M whose columns have norm at most b, and
hands back A = (B + M)^T (B + M). Everything downstream (the sample-size
threshold, the recovery metrics, the robustness certificate, the
approximation-ratio experiment) consumes these instances.
"""

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .baselines import brute_force_opt
from .linalg import check_symmetric
from .rounding import greedy_diagonal_init
from .sdp import CgalConfig, solve_spca_sdp

NOISE_KINDS = ("gaussian", "rademacher_scaled", "uniform_scaled")
PERTURBATION_KINDS = ("zero", "constant_column", "random_bounded")


@dataclass
class ModelSpec:
    """Parameters of one spiked-covariance sampling problem.

    sigma2 doubles as the base variance (every non-spike eigenvalue of
    Sigma equals sigma2) and as the sub-Gaussian proxy used by the
    sample-size threshold; for the gaussian noise kind the two coincide.
    The spike is flat: v_i = 1 / sqrt(k) on the first k coordinates, so
    its smallest nonzero entry is a = 1 / sqrt(k). spike_floor is a
    validation lower bound on that entry.
    """

    d: int
    k: int
    n: int
    sigma2: float = 1.0
    spike_gap: float = 1.0
    spike_floor: float = 0.0
    perturbation_column_bound: float = 0.0
    noise_kind: str = "gaussian"
    perturbation_kind: str = "zero"

    def __post_init__(self):
        if not 1 <= self.k <= self.d:
            raise ValueError(f"need 1 <= k <= d, got k={self.k}, d={self.d}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")
        if self.spike_gap <= 0:
            raise ValueError("spike_gap must be positive")
        if self.perturbation_column_bound < 0:
            raise ValueError("perturbation_column_bound must be >= 0")
        if self.noise_kind not in NOISE_KINDS:
            raise ValueError(f"noise_kind must be one of {NOISE_KINDS}")
        if self.perturbation_kind not in PERTURBATION_KINDS:
            raise ValueError(
                f"perturbation_kind must be one of {PERTURBATION_KINDS}"
            )
        a = 1.0 / math.sqrt(self.k)
        if self.spike_floor > a + 1e-12:
            raise ValueError(
                f"spike_floor {self.spike_floor} is infeasible for the flat "
                f"spike, whose smallest entry is {a:.6f}"
            )

    @property
    def spike_min_entry(self) -> float:
        return 1.0 / math.sqrt(self.k)


@dataclass
class ModelInstance:
    spec: ModelSpec
    seed: int
    v: np.ndarray
    Sigma: np.ndarray
    B: np.ndarray
    M: np.ndarray
    A: np.ndarray


def _unit_noise(rng: np.random.Generator, n: int, d: int, kind: str) -> np.ndarray:
    if kind == "gaussian":
        return rng.standard_normal((n, d))
    if kind == "rademacher_scaled":
        return rng.integers(0, 2, size=(n, d)).astype(float) * 2.0 - 1.0
    if kind == "uniform_scaled":
        return rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), size=(n, d))
    raise ValueError(f"unknown noise kind {kind!r}")


def _perturbation(
    rng: np.random.Generator, n: int, d: int, b: float, kind: str
) -> np.ndarray:
    if kind == "zero" or b == 0.0:
        return np.zeros((n, d))
    if kind == "constant_column":
        # Rank one: every column is the same unit vector scaled to norm b.
        col = np.full(n, 1.0 / math.sqrt(n))
        return b * np.outer(col, np.ones(d))
    if kind == "random_bounded":
        M = rng.standard_normal((n, d))
        norms = np.linalg.norm(M, axis=0)
        norms[norms == 0.0] = 1.0
        targets = b * rng.uniform(0.0, 1.0, size=d)
        targets[rng.integers(0, d)] = b  # the bound is attained exactly
        return M * (targets / norms)[None, :]
    raise ValueError(f"unknown perturbation kind {kind!r}")


def gen_model(spec: ModelSpec, seed: int) -> ModelInstance:
    """Draw one instance; deterministic in (spec, seed).

    The max column norm of M equals the declared bound exactly (or M = 0),
    and Sigma's top eigenvector is the flat spike with eigengap spike_gap.
    """
    rng = np.random.default_rng(seed)
    d, k, n = spec.d, spec.k, spec.n
    v = np.zeros(d)
    v[:k] = 1.0 / math.sqrt(k)
    Sigma = spec.sigma2 * np.eye(d) + spec.spike_gap * np.outer(v, v)
    # Sigma^{1/2} in closed form: the spike direction is an eigenvector.
    root_rest = math.sqrt(spec.sigma2)
    root_top = math.sqrt(spec.sigma2 + spec.spike_gap)
    Sigma_half = root_rest * np.eye(d) + (root_top - root_rest) * np.outer(v, v)
    G = _unit_noise(rng, n, d, spec.noise_kind)
    B = G @ Sigma_half
    M = _perturbation(rng, n, d, spec.perturbation_column_bound, spec.perturbation_kind)
    X = B + M
    A = check_symmetric(X.T @ X, tol=1e-8)
    return ModelInstance(spec=spec, seed=seed, v=v, Sigma=Sigma, B=B, M=M, A=A)


def error_decomposition(inst: ModelInstance) -> tuple[np.ndarray, float]:
    """E = A - n * Sigma and its entrywise max norm.

    E collects the sampling fluctuation of B^T B around its mean together
    with every term involving the adversarial M.
    """
    E = inst.A - inst.spec.n * inst.Sigma
    return E, float(np.max(np.abs(E)))


def sample_size_threshold(
    d: int,
    k: int,
    sigma2: float,
    b: float,
    gap: float,
    a: float,
    max_var: float,
    scale_const: float,
) -> float:
    """Sample-size threshold guaranteeing entrywise recovery at level a^2/2.

    Literal form: max of
      scale_const * [ (k^2 sigma2^2 log d + b^2 k^2 (sigma2 + max_var))
                      / (gap^2 a^4)  +  k b^2 / (gap a^2) ],
      4 / a^2,  and  log d.
    scale_const is the absolute constant of the concentration argument,
    calibrated empirically once and then frozen.
    """
    if a <= 0 or gap <= 0:
        raise ValueError("a and gap must be positive")
    main = scale_const * (
        (k**2 * sigma2**2 * math.log(d) + b**2 * k**2 * (sigma2 + max_var))
        / (gap**2 * a**4)
        + k * b**2 / (gap * a**2)
    )
    return max(main, 4.0 / a**2, math.log(d))


def n_star(spec: ModelSpec, scale_const: float) -> float:
    """sample_size_threshold evaluated at a spec's own parameters."""
    a = spec.spike_min_entry
    max_var = spec.sigma2 + spec.spike_gap * a * a
    return sample_size_threshold(
        d=spec.d,
        k=spec.k,
        sigma2=spec.sigma2,
        b=spec.perturbation_column_bound,
        gap=spec.spike_gap,
        a=a,
        max_var=max_var,
        scale_const=scale_const,
    )


@dataclass
class RecoveryMetrics:
    entry_inf_dist: float
    frobenius_dist: float
    support_estimate: tuple[int, ...]
    support_recovered: bool
    half_level_pass: bool
    level: float


def recovery_metrics(W: np.ndarray, v: np.ndarray, a: float | None = None) -> RecoveryMetrics:
    """Distance of a candidate W from the rank-one truth v v^T.

    The support estimate thresholds the diagonal at a^2 / 2 (a defaulting
    to the smallest nonzero entry of v), the same level the entrywise
    guarantee is stated at.
    """
    W = check_symmetric(W, tol=1e-8)
    v = np.asarray(v, dtype=float)
    if v.shape != (W.shape[0],):
        raise ValueError("v must match W's dimension")
    nz = np.abs(v) > 0
    if a is None:
        if not nz.any():
            raise ValueError("v is identically zero")
        a = float(np.min(np.abs(v[nz])))
    if a <= 0:
        raise ValueError("a must be positive")
    diff = W - np.outer(v, v)
    inf_dist = float(np.max(np.abs(diff)))
    level = a * a / 2.0
    est = np.nonzero(np.diag(W) > level)[0]
    true_support = np.nonzero(nz)[0]
    return RecoveryMetrics(
        entry_inf_dist=inf_dist,
        frobenius_dist=float(np.linalg.norm(diff)),
        support_estimate=tuple(int(i) for i in est),
        support_recovered=bool(
            est.size == true_support.size and np.array_equal(est, true_support)
        ),
        half_level_pass=bool(inf_dist <= level),
        level=level,
    )


@dataclass
class RobustnessCheck:
    distance: float
    bound: float
    passed: bool
    entry_error: float
    eigengap: float
    base_term: float


def deterministic_robustness_check(
    A: np.ndarray,
    BtB: np.ndarray,
    v: np.ndarray,
    k: int,
    W: np.ndarray,
    sdp_gap: float = 0.0,
) -> RobustnessCheck:
    """Frobenius stability bound for near-optimal SDP solutions.

    With A = BtB + E, ||E||_inf = a, v the k-sparse top eigenvector of BtB
    at eigengap g > 0, any SDP solution within sdp_gap of optimal obeys

        ||W - v v^T||_F <= c + sqrt(c + 2 sdp_gap / g),  c = 2 a k / g,

    the suboptimality entering through the curvature constant 2 / g.
    """
    A = check_symmetric(A)
    BtB = check_symmetric(BtB)
    W = check_symmetric(W, tol=1e-8)
    v = np.asarray(v, dtype=float)
    d = A.shape[0]
    if BtB.shape[0] != d or W.shape[0] != d or v.shape != (d,):
        raise ValueError("shape mismatch")
    if sdp_gap < 0:
        raise ValueError("sdp_gap must be >= 0")
    if abs(float(np.linalg.norm(v)) - 1.0) > 1e-8:
        raise ValueError("v must be a unit vector")
    if int(np.sum(np.abs(v) > 1e-10)) > k:
        raise ValueError("v must be k-sparse")
    vals = np.linalg.eigvalsh(BtB)
    gap = float(vals[-1] - vals[-2])
    if gap <= 0:
        raise ValueError("BtB must have a positive top eigengap")
    resid = float(np.linalg.norm(BtB @ v - vals[-1] * v))
    if resid > 1e-6 * max(1.0, float(vals[-1])):
        raise ValueError("v is not the top eigenvector of BtB")
    entry_error = float(np.max(np.abs(A - BtB)))
    c = 2.0 * entry_error * k / gap
    bound = c + math.sqrt(c + 2.0 * sdp_gap / gap)
    distance = float(np.linalg.norm(W - np.outer(v, v)))
    return RobustnessCheck(
        distance=distance,
        bound=bound,
        passed=bool(distance <= bound + 1e-10),
        entry_error=entry_error,
        eigengap=gap,
        base_term=c,
    )


@dataclass
class RatioExperiment:
    spec: ModelSpec
    oversample: float
    n_used: int
    threshold: float
    ratios: list[float]
    pass_fraction: float
    elapsed_seconds: float


def ratio_experiment(
    spec: ModelSpec,
    oversample: float,
    trials: int,
    seed: int,
    scale_const: float,
    cgal: CgalConfig | None = None,
) -> RatioExperiment:
    """Measure OPT / (greedy-initialized objective) at n = oversample * n*.

    Each trial draws a fresh instance, solves the SDP, runs only the
    deterministic diagonal initializer on W, and compares its objective to
    the exact optimum from brute force (so d and k must be small enough to
    enumerate). The target ratio is 1 + 2 / (8 sqrt(oversample) - 1).
    """
    if oversample < 1:
        raise ValueError("oversample must be >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if math.comb(spec.d, spec.k) > 10**5:
        raise ValueError("d choose k too large for the exact reference")
    t0 = time.perf_counter()
    n_used = int(math.ceil(oversample * n_star(spec, scale_const)))
    run_spec = replace(spec, n=n_used)
    threshold = 1.0 + 2.0 / (8.0 * math.sqrt(oversample) - 1.0)
    ratios: list[float] = []
    for t in range(trials):
        inst = gen_model(run_spec, seed + t)
        sol = solve_spca_sdp(inst.A, spec.k, cgal)
        z0 = greedy_diagonal_init(inst.A, sol.W, spec.k)
        opt, _ = brute_force_opt(inst.A, spec.k)
        ratios.append(float(opt / z0.objective))
    hits = sum(1 for r in ratios if r <= threshold)
    return RatioExperiment(
        spec=run_spec,
        oversample=oversample,
        n_used=n_used,
        threshold=threshold,
        ratios=ratios,
        pass_fraction=hits / trials,
        elapsed_seconds=time.perf_counter() - t0,
    )
