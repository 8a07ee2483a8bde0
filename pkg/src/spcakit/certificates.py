"""Optimality certificates and structural diagnostics for the relaxation.

Three related toolsets live here:

* diagnostics of an SDP solution W: the sum of square roots of its diagonal
  (abbreviated ssr) with the structural upper bounds that control rounding
  quality, and the l1 test on the top eigenvector that certifies when the
  relaxation is tight;
* constructors and checkers for KKT certificates of SDP optimality,
  including an explicit rank-one family where the optimum and multipliers
  are known in closed form;
* the eigengap curvature inequality used by the robustness analysis.

Every report knows how to serialize itself to plain dicts (and hence JSON)
with per-condition margins.
"""

import json
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .linalg import _fix_sign, check_symmetric, principal_submatrix

# Relative threshold for "numerically nonzero" diagonal entries and
# eigenvalues when estimating support and rank.
_RANK_REL_TOL = 1e-10

# Largest top-eigenspace multiplicity for which the sign-vector search in
# check_sparse_top_eigvec is attempted (2^r candidates).
_SIGN_SEARCH_CAP = 12

_KKT_TOL = 1e-8


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, dict):
        return {key: _jsonable(val) for key, val in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(val) for val in x]
    return x


@dataclass
class SsrReport:
    """Diagnostics of sum_i sqrt(W_ii) for a unit-trace PSD matrix W.

    ssr drives the success probability of randomized rounding through the
    normalized ratio c0 = ssr / sqrt(k). bounds holds one record per
    structural upper bound: the diagonal-support bound sqrt(|DSupp|), the
    rank bound sqrt(rank * k) (only applicable when ||W||_1 <= k), and a
    reference value under geometric eigenvalue decay, which carries an
    unspecified absolute constant and therefore reports a ratio instead of
    a pass flag.
    """

    ssr: float
    c0: float
    k: int
    dsupp_size: int
    rank_estimate: int
    entry_l1: float
    bounds: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


@dataclass
class KktCertificate:
    """Candidate optimality certificate (w, lam, mu, Z) for the SDP.

    w is the claimed optimal unit vector (the optimum being w w^T), lam and
    mu the multipliers of the trace and l1 constraints, Z the subgradient
    sign matrix.
    """

    w: np.ndarray
    lam: float
    mu: float
    Z: np.ndarray

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


@dataclass
class ConditionCheck:
    name: str
    margin: float
    passed: bool


@dataclass
class KktReport:
    passed: bool
    unique: bool
    conditions: list[ConditionCheck]
    tol: float

    def condition(self, name: str) -> ConditionCheck:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


@dataclass
class RankOneInstance:
    """A matrix shift * I + u u^T whose SDP optimum is known exactly."""

    A: np.ndarray
    certificate: KktCertificate
    k: int
    t_star: float
    alpha: float
    beta: float
    window: tuple[float, float]
    min_support_entry: float

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


class CurvatureCheck(NamedTuple):
    lhs: float
    rhs: float
    passed: bool


@dataclass
class SpectralConditionReport:
    """Result of check_rank_one_conditions on a candidate support block.

    gap_* is the eigenvalue-dominance condition, contraction_* the
    sign-stability condition over the resolvent window, off_support_* the
    smallness condition on entries outside the S x S block. When all three
    hold, w_star and certificate describe the exact SDP optimum.
    """

    support: tuple[int, ...]
    k: int
    gamma: float
    grid_size: int
    D: float
    delta: float
    lambda_star: float | None
    mu_star: float | None
    gap_pass: bool
    gap_margin: float
    contraction_pass: bool
    contraction_margin: float
    off_support_pass: bool
    off_support_margin: float
    passed: bool
    w_star: np.ndarray | None
    certificate: KktCertificate | None

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def ssr_report(W: np.ndarray, k: int) -> SsrReport:
    """Diagonal square-root diagnostics of a unit-trace PSD matrix.

    The trace may deviate from one by at most 1e-8 (the matrix is rescaled
    to unit trace before anything else); a larger deviation is an error.
    """
    W = check_symmetric(W, tol=1e-8)
    if k < 1:
        raise ValueError("k must be >= 1")
    tr = float(np.trace(W))
    if abs(tr - 1.0) > 1e-8:
        raise ValueError(f"trace must be 1 within 1e-8, got {tr!r}")
    W = W / tr
    vals = np.linalg.eigvalsh(W)
    lam1 = float(vals[-1])
    if lam1 <= 0.0:
        raise ValueError("matrix has no positive eigenvalue")
    if float(vals[0]) < -1e-9 * lam1:
        raise ValueError(
            f"matrix is materially indefinite (min eigenvalue {float(vals[0]):.3e})"
        )
    thresh = _RANK_REL_TOL * lam1
    diag = np.clip(np.diag(W), 0.0, None)
    ssr = float(np.sum(np.sqrt(diag)))
    dsupp = int(np.sum(diag > thresh))
    rank = int(np.sum(vals > thresh))
    entry_l1 = float(np.sum(np.abs(W)))
    d = W.shape[0]

    bounds: list[dict] = []
    b1 = float(np.sqrt(dsupp))
    bounds.append(
        {
            "name": "diag_support",
            "bound": b1,
            "holds": ssr <= b1 + 1e-9 * max(1.0, b1),
        }
    )
    b2 = float(np.sqrt(rank * k))
    rec2 = {
        "name": "rank",
        "bound": b2,
        "applicable": entry_l1 <= k * (1.0 + 1e-9),
    }
    rec2["holds"] = bool(rec2["applicable"] and ssr <= b2 + 1e-9 * max(1.0, b2))
    bounds.append(rec2)
    # Geometric eigendecay reference: only when consecutive significant
    # eigenvalues decay by a uniform factor q < 1. The bound's absolute
    # constant is unspecified, so only the achieved ratio is reported.
    sig = vals[vals > thresh][::-1]
    if sig.size >= 2:
        q = float(np.max(sig[1:] / sig[:-1]))
        if q < 1.0 - 1e-9:
            ref = float(np.sqrt(k * np.log(d) / np.log(1.0 / q))) if d > 1 else 0.0
            bounds.append(
                {
                    "name": "eigendecay",
                    "q": q,
                    "reference": ref,
                    "observed_ratio": ssr / ref if ref > 0 else float("inf"),
                }
            )
    return SsrReport(
        ssr=ssr,
        c0=ssr / float(np.sqrt(k)),
        k=k,
        dsupp_size=dsupp,
        rank_estimate=rank,
        entry_l1=entry_l1,
        bounds=bounds,
    )


def check_sparse_top_eigvec(A: np.ndarray, k: int) -> tuple[bool, float]:
    """Does some top eigenvector v of A satisfy ||v||_1 <= sqrt(k)?

    If so, v v^T is feasible for the SDP and hence exactly optimal, so the
    relaxation is tight and rounding is exact. When the top eigenvalue is
    degenerate (multiplicity r) the dense eigensolver's choice of basis is
    arbitrary, so for r <= 12 all 2^r normalized sign combinations of the
    eigenbasis are searched for a qualifying vector. Returns the flag and
    the best l1 norm found.
    """
    A = check_symmetric(A)
    if k < 1:
        raise ValueError("k must be >= 1")
    vals, vecs = np.linalg.eigh(A)
    lam1 = float(vals[-1])
    budget = float(np.sqrt(k))
    best = float(np.sum(np.abs(vecs[:, -1])))
    if best <= budget + 1e-10:
        return True, best
    deg_tol = _RANK_REL_TOL * max(1.0, abs(lam1))
    basis = vecs[:, vals >= lam1 - deg_tol]
    r = basis.shape[1]
    if 2 <= r <= _SIGN_SEARCH_CAP:
        scale = 1.0 / np.sqrt(r)
        for code in range(2 ** (r - 1)):
            # Fix the first sign to +1; v and -v have equal l1 norm.
            y = np.ones(r)
            for b in range(1, r):
                if code >> (b - 1) & 1:
                    y[b] = -1.0
            cand = float(np.sum(np.abs(basis @ (y * scale))))
            best = min(best, cand)
        if best <= budget + 1e-10:
            return True, best
    return best <= budget + 1e-10, best


def verify_kkt(
    A: np.ndarray, k: int, cert: KktCertificate, tol: float = _KKT_TOL
) -> KktReport:
    """Check a candidate certificate against the SDP optimality conditions.

    Verifies primal feasibility of w w^T (unit norm, l1 budget), dual
    feasibility (mu >= 0, Z entries in [-1, 1] agreeing with sign(w) on the
    support, lam I - A + mu Z PSD), and complementary slackness (both the
    budget activity product and stationarity on w). Margins are scaled by
    the spectral norm of A where the quantity has matrix units. Uniqueness
    of the optimum is flagged separately when lam I - A + mu Z has rank
    d - 1, detected via its second-smallest eigenvalue.
    """
    A = check_symmetric(A)
    d = A.shape[0]
    if not 1 <= k <= d:
        raise ValueError(f"k must satisfy 1 <= k <= {d}, got {k}")
    w = np.asarray(cert.w, dtype=float)
    Z = np.asarray(cert.Z, dtype=float)
    if w.shape != (d,) or Z.shape != (d, d):
        raise ValueError("certificate shapes do not match A")
    evals_A = np.linalg.eigvalsh(A)
    scale = max(1.0, float(np.max(np.abs(evals_A))))
    budget = float(np.sqrt(k))
    checks: list[ConditionCheck] = []

    def add(name: str, margin: float, limit: float = 0.0):
        checks.append(ConditionCheck(name, float(margin), bool(margin >= -limit)))

    l2 = float(np.linalg.norm(w))
    l1 = float(np.sum(np.abs(w)))
    add("unit_norm", -abs(l2 - 1.0) + tol, 0.0)
    add("sparsity_budget", budget + tol - l1, 0.0)
    add("mu_nonnegative", cert.mu + tol * scale, 0.0)
    asym = float(np.max(np.abs(Z - Z.T)))
    add("sign_matrix_symmetric", tol - asym, 0.0)
    Zs = (Z + Z.T) / 2.0
    add("sign_matrix_bounded", 1.0 + tol - float(np.max(np.abs(Zs))), 0.0)
    on = np.abs(w) > 1e-10
    if np.any(on):
        sw = np.sign(w[on])
        block = Zs[np.ix_(on.nonzero()[0], on.nonzero()[0])]
        dev = float(np.max(np.abs(block - np.outer(sw, sw))))
    else:
        dev = 0.0
    add("sign_matrix_consistent", tol - dev, 0.0)
    M = cert.lam * np.eye(d) - A + cert.mu * Zs
    evals_M = np.linalg.eigvalsh(M)
    add("dual_psd", float(evals_M[0]) + tol * scale, 0.0)
    add("budget_active", tol * scale - abs(cert.mu * (l1 - budget)), 0.0)
    add("stationarity", tol * scale - float(np.max(np.abs(M @ w))), 0.0)
    passed = all(c.passed for c in checks)
    unique = bool(d >= 2 and float(evals_M[1]) > tol * scale)
    return KktReport(passed=passed, unique=unique, conditions=checks, tol=tol)


def _shrunk_norms(m: float, size: int, t: float) -> tuple[float, float]:
    """l1 and l2 norms of u - t * sign(u) for unit u with support size
    `size` and l1 norm m, valid while t is below the smallest |u_i|."""
    l1 = m - size * t
    l2 = float(np.sqrt(max(1.0 - 2.0 * t * m + size * t * t, 0.0)))
    return l1, l2


def build_rank_one_instance(
    u: np.ndarray, k: int, lambda_shift: float = 0.0
) -> RankOneInstance:
    """Construct A = lambda_shift * I + u u^T with a closed-form certificate.

    u is normalized first. Writing m = ||u||_1 and T = supp(u), the
    construction requires m > sqrt(k) (otherwise u itself is optimal and no
    shrinkage is needed) and requires the smallest support entry to lie
    strictly inside the window

        (m - h) / |T| < min_{i in T} |u_i| < (m + h) / |T|,
        h = sqrt(k (|T| - m^2) / (|T| - k)),

    which is exactly the condition for soft shrinkage toward the sign
    vector to hit l1 norm sqrt(k) * l2 norm before any entry changes sign.
    The shrinkage level t_star is found by bisection to 1e-12 and yields
    the optimal w and both multipliers in closed form. The emitted
    certificate is verified before returning.
    """
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.size == 0:
        raise ValueError("u must be a nonempty vector")
    if lambda_shift < 0.0:
        raise ValueError("lambda_shift must be nonnegative, the family is PSD")
    nrm = float(np.linalg.norm(u))
    if nrm == 0.0:
        raise ValueError("u must be nonzero")
    u = u / nrm
    scale = float(np.max(np.abs(u)))
    support = np.abs(u) > 1e-12 * scale
    if not np.all(support | (u == 0.0)):
        # Negligible but nonzero entries would confuse the sign algebra.
        u = np.where(support, u, 0.0)
        u = u / float(np.linalg.norm(u))
    size = int(np.sum(support))
    m = float(np.sum(np.abs(u)))
    budget = float(np.sqrt(k))
    if k < 1:
        raise ValueError("k must be >= 1")
    if m <= budget:
        raise ValueError(
            f"||u||_1/||u||_2 = {m:.6f} must exceed sqrt(k) = {budget:.6f}; "
            "below that the unshrunk vector is already optimal"
        )
    if size <= k:
        raise ValueError(f"support size {size} must exceed k = {k}")
    if m * m >= size - 1e-15:
        raise ValueError(
            "u is flat on its support, the admissible window degenerates"
        )
    half = float(np.sqrt(k * (size - m * m) / (size - k)))
    lo = (m - half) / size
    hi = (m + half) / size
    tmin = float(np.min(np.abs(u[support])))
    if tmin <= lo:
        raise ValueError(
            f"min support entry {tmin:.6f} is at or below the lower window "
            f"edge {lo:.6f}"
        )
    if tmin >= hi:
        raise ValueError(
            f"min support entry {tmin:.6f} is at or above the upper window "
            f"edge {hi:.6f}"
        )

    def gap(t: float) -> float:
        l1, l2 = _shrunk_norms(m, size, t)
        return l1 - budget * l2

    a, b = 0.0, tmin
    if gap(a) <= 0 or gap(b) >= 0:
        raise RuntimeError("bisection bracket failure in shrinkage search")
    while b - a > 1e-12:
        mid = (a + b) / 2.0
        if gap(mid) > 0:
            a = mid
        else:
            b = mid
    t_star = (a + b) / 2.0
    sgn = np.sign(u)
    shrunk = u - t_star * sgn
    alpha = float(np.linalg.norm(shrunk))
    beta = t_star
    w = shrunk / alpha
    lam_base = alpha * (alpha + beta * budget)
    mu = beta * (alpha + beta * budget) / budget
    A = lambda_shift * np.eye(u.size) + np.outer(u, u)
    cert = KktCertificate(w=w, lam=lam_base + lambda_shift, mu=mu, Z=np.outer(sgn, sgn))
    report = verify_kkt(A, k, cert)
    if not report.passed:
        failing = [c.name for c in report.conditions if not c.passed]
        raise RuntimeError(f"constructed certificate failed verification: {failing}")
    return RankOneInstance(
        A=A,
        certificate=cert,
        k=k,
        t_star=t_star,
        alpha=alpha,
        beta=beta,
        window=(lo, hi),
        min_support_entry=tmin,
    )


def check_rank_one_conditions(
    A: np.ndarray,
    S: np.ndarray,
    k: int,
    gamma: float,
    grid_size: int = 512,
) -> SpectralConditionReport:
    """Test whether the block eigensystem on S certifies a rank-one optimum.

    Three conditions are evaluated on the eigensystem of A[S, S] (top pair
    lam1 > lam2 required, eigenvector v1 fully supported on S):

    * gap: ||v1||_1 > sqrt(k) and lam1 dominates lam2 by the factor the
      mixing coefficient D demands;
    * contraction: on a grid over the resolvent window
      [lam1 / (D + 1), lam1], the lower eigenvectors' contribution stays
      gamma-dominated coordinatewise, so the resolvent direction keeps the
      sign pattern of v1;
    * off_support: every entry of A outside the S x S block is small
      relative to delta, the depth below lam1 on which the resolvent's
      l1/l2 ratio stays above sqrt(k).

    When a crossing exists, lambda_star solves ratio(lambda) = sqrt(k) by
    bisection and the full certificate (w_star, multipliers, sign matrix)
    is emitted; it passes verify_kkt exactly when the conditions hold.
    """
    A = check_symmetric(A)
    d = A.shape[0]
    S = np.asarray(S, dtype=int)
    AS = principal_submatrix(A, S)
    size = S.size
    if size < 2:
        raise ValueError("support must have at least two indices")
    if not 1 <= k < size:
        raise ValueError(f"need 1 <= k < |S|, got k={k}, |S|={size}")
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    vals, vecs = np.linalg.eigh(AS)
    lam1 = float(vals[-1])
    lam2 = float(vals[-2])
    if lam1 <= lam2:
        raise ValueError("top eigenvalue of the block must be simple")
    if float(vals[0]) < -1e-10 * max(1.0, abs(lam1)):
        raise ValueError("block is materially indefinite")
    v1 = _fix_sign(vecs[:, -1])
    if np.any(np.abs(v1) <= 1e-10):
        j = int(np.argmin(np.abs(v1)))
        raise ValueError(
            f"top block eigenvector vanishes at support position {j}; "
            "its support must be all of S"
        )
    s = np.sign(v1)
    m1 = float(np.sum(np.abs(v1)))
    budget = float(np.sqrt(k))
    alpha_low = vecs[:, :-1].T @ s
    denom = float(k * np.sum(alpha_low**2))
    num = 4.0 * m1**4 - k * m1**2
    D = float(np.sqrt(num / denom)) if denom > 0 and num >= 0 else float("inf")

    gap_lhs = (1.0 - D / (1.0 - gamma) * np.sqrt(k * size) / m1**2) * lam1
    gap_rhs = (D + 1.0) * lam2
    gap_margin = float(gap_lhs - gap_rhs) if np.isfinite(D) else float("-inf")
    gap_pass = bool(m1 > budget and np.isfinite(D) and gap_margin >= 0.0)

    lam_lo = lam1 / (D + 1.0) if np.isfinite(D) else lam2 + (lam1 - lam2) * 0.5
    grid = np.linspace(lam_lo, lam1, grid_size)
    with np.errstate(divide="ignore", invalid="ignore"):
        coeff = (lam1 - grid[:, None]) / (vals[None, :-1] - grid[:, None])
    rhs = np.abs((coeff * alpha_low[None, :]) @ vecs[:, :-1].T)
    lhs = gamma * m1 * np.abs(v1)[None, :]
    diffs = lhs - rhs
    contraction_margin = float(np.nanmin(diffs)) if np.all(np.isfinite(rhs)) else float("-inf")
    contraction_pass = bool(np.isfinite(contraction_margin) and contraction_margin >= 0.0)

    # Resolvent ratio scan: depth delta below lam1 on which
    # ||w(lambda)||_1 / ||w(lambda)||_2 stays above sqrt(k).
    alpha_all = vecs.T @ s
    eps_gap = 1e-9 * (lam1 - lam_lo)
    grid_r = np.linspace(lam_lo, lam1 - eps_gap, grid_size)
    wgrid = (alpha_all[None, :] / (vals[None, :] - grid_r[:, None])) @ vecs.T
    ratios = np.sum(np.abs(wgrid), axis=1) / np.linalg.norm(wgrid, axis=1)
    above = ratios >= budget
    lambda_star: float | None = None
    mu_star: float | None = None
    delta = 0.0
    w_star = None
    certificate = None
    if above[-1]:
        idx = grid_size - 1
        while idx > 0 and above[idx - 1]:
            idx -= 1
        delta = float(lam1 - grid_r[idx])

        def ratio_at(lam: float) -> float:
            wv = vecs @ (alpha_all / (vals - lam))
            return float(np.sum(np.abs(wv)) / np.linalg.norm(wv))

        if idx == 0:
            lambda_star = float(grid_r[0])
        else:
            a, b = float(grid_r[idx - 1]), float(grid_r[idx])
            while b - a > 1e-13 * max(1.0, abs(lam1)):
                mid = (a + b) / 2.0
                if ratio_at(mid) >= budget:
                    b = mid
                else:
                    a = mid
            lambda_star = (a + b) / 2.0

    off_mask = np.ones((d, d), dtype=bool)
    off_mask[np.ix_(S, S)] = False
    off_max = float(np.max(np.abs(A[off_mask]))) if off_mask.any() else 0.0

    off_pass = False
    off_margin = float("-inf")
    if lambda_star is not None:
        wv = vecs @ (alpha_all / (vals - lambda_star))
        wnorm = float(np.linalg.norm(wv))
        mu_star = 1.0 / (budget * wnorm)
        w_in = wv / wnorm
        if float(w_in @ v1) < 0:
            w_in = -w_in
        w_full = np.zeros(d)
        w_full[S] = w_in
        Z = A / mu_star
        Z[np.ix_(S, S)] = np.outer(s, s)
        certificate = KktCertificate(
            w=w_full, lam=float(lambda_star), mu=float(mu_star), Z=Z
        )
        w_star = w_full
        threshold = delta / (2.0 * budget * m1**2)
        off_margin = float(threshold - off_max)
        off_pass = bool(off_margin >= 0.0)

    passed = bool(gap_pass and contraction_pass and off_pass and lambda_star is not None)
    return SpectralConditionReport(
        support=tuple(int(i) for i in S),
        k=k,
        gamma=gamma,
        grid_size=grid_size,
        D=D,
        delta=delta,
        lambda_star=lambda_star,
        mu_star=mu_star,
        gap_pass=gap_pass,
        gap_margin=gap_margin,
        contraction_pass=contraction_pass,
        contraction_margin=contraction_margin,
        off_support_pass=off_pass,
        off_support_margin=off_margin,
        passed=passed,
        w_star=w_star,
        certificate=certificate,
    )


def curvature_gap_check(B: np.ndarray, l: int, F: np.ndarray) -> CurvatureCheck:
    """Eigengap curvature inequality for trace-l contractions.

    For symmetric B with eigengap delta = lambda_l - lambda_{l+1} > 0 and
    any F with 0 <= F <= I, tr(F) = l, the top-l eigenprojector P of B
    satisfies ||P - F||_F^2 <= (2 / delta) tr(B (P - F)). Returns both
    sides and the comparison.
    """
    B = check_symmetric(B)
    F = check_symmetric(F, tol=1e-8)
    d = B.shape[0]
    if F.shape[0] != d:
        raise ValueError("B and F must have matching shape")
    if not 1 <= l < d:
        raise ValueError(f"need 1 <= l < {d}, got l={l}")
    fvals = np.linalg.eigvalsh(F)
    if float(fvals[0]) < -1e-10 or float(fvals[-1]) > 1.0 + 1e-10:
        raise ValueError(
            f"F must satisfy 0 <= F <= I; eigenvalue range "
            f"[{float(fvals[0]):.3e}, {float(fvals[-1]):.6f}]"
        )
    if abs(float(np.trace(F)) - l) > 1e-8:
        raise ValueError(f"tr(F) must equal l={l} within 1e-8")
    vals, vecs = np.linalg.eigh(B)
    delta = float(vals[-l] - vals[-l - 1])
    if delta <= 0.0:
        raise ValueError(f"eigengap lambda_{l} - lambda_{l + 1} must be positive")
    P = vecs[:, -l:] @ vecs[:, -l:].T
    diff = P - F
    lhs = float(np.sum(diff * diff))
    rhs = float(2.0 / delta * np.sum(B * diff))
    return CurvatureCheck(lhs, rhs, bool(lhs <= rhs + 1e-10 * max(1.0, abs(rhs))))
