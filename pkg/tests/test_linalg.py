import numpy as np
import pytest

from helpers import jacobi_eigh, project_l1_oracle, random_psd
from spcakit.linalg import (
    EigenSolverError,
    check_symmetric,
    full_eigendecomposition,
    matrix_norm,
    matrix_sqrt,
    principal_submatrix,
    project_l1_ball,
    top_eigpair,
)


def test_check_symmetric_accepts_and_symmetrizes():
    M = np.array([[1.0, 2.0], [2.0 + 1e-14, 3.0]])
    out = check_symmetric(M)
    assert np.allclose(out, out.T)
    assert out[0, 1] == pytest.approx(2.0, abs=1e-13)


def test_check_symmetric_rejects_asymmetry_and_nonfinite():
    with pytest.raises(ValueError):
        check_symmetric(np.array([[1.0, 2.0], [2.5, 3.0]]))
    with pytest.raises(ValueError):
        check_symmetric(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        check_symmetric(np.ones((2, 3)))


def test_top_eigpair_diagonal():
    val, vec = top_eigpair(np.diag([3.0, 2.0, 1.0]))
    assert val == pytest.approx(3.0, abs=1e-12)
    assert np.allclose(np.abs(vec), [1.0, 0.0, 0.0], atol=1e-10)
    # deterministic sign: first significant entry is positive
    assert vec[0] > 0


def test_full_eigendecomposition_diagonal():
    pairs = full_eigendecomposition(np.diag([3.0, 2.0, 1.0]))
    assert [p.value for p in pairs] == pytest.approx([3.0, 2.0, 1.0])
    for p, idx in zip(pairs, [0, 1, 2]):
        e = np.zeros(3)
        e[idx] = 1.0
        assert np.allclose(np.abs(p.vector), e, atol=1e-10)


def test_top_eigpair_matches_jacobi_oracle():
    rng = np.random.default_rng(7)
    for _ in range(20):
        d = int(rng.integers(2, 9))
        M = rng.standard_normal((d, d))
        M = (M + M.T) / 2
        vals, vecs = jacobi_eigh(M)
        val, vec = top_eigpair(M)
        assert val == pytest.approx(vals[0], abs=1e-9)
        assert abs(float(vec @ vecs[:, 0])) == pytest.approx(1.0, abs=1e-7)


def test_full_eigendecomposition_reconstructs():
    rng = np.random.default_rng(11)
    M = random_psd(rng, 6)
    pairs = full_eigendecomposition(M)
    R = sum(p.value * np.outer(p.vector, p.vector) for p in pairs)
    assert np.allclose(R, M, atol=1e-10)
    vals = [p.value for p in pairs]
    assert vals == sorted(vals, reverse=True)


def test_top_eigpair_iterative_path_large_matrix():
    # d > 400 takes the Lanczos route; plant a dominant spike
    rng = np.random.default_rng(3)
    d = 450
    q = rng.standard_normal(d)
    q /= np.linalg.norm(q)
    A = np.diag(rng.uniform(0.0, 1.0, size=d)) + 5.0 * np.outer(q, q)
    A = (A + A.T) / 2
    val, vec = top_eigpair(A, seed=0)
    ref = np.linalg.eigvalsh(A)[-1]
    assert val == pytest.approx(ref, rel=1e-8)
    assert np.linalg.norm(A @ vec - val * vec) <= 1e-6 * ref


def test_top_eigpair_reports_residual_on_failure():
    # an unreachable tolerance forces the iterative path to give up
    rng = np.random.default_rng(5)
    A = random_psd(rng, 420)
    with pytest.raises(EigenSolverError) as info:
        top_eigpair(A, tol=1e-300)
    assert info.value.residual > 0


def test_matrix_sqrt_examples():
    assert np.allclose(matrix_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    assert np.allclose(matrix_sqrt(np.eye(3)), np.eye(3))


def test_matrix_sqrt_squares_back():
    rng = np.random.default_rng(13)
    for _ in range(10):
        W = random_psd(rng, int(rng.integers(2, 7)))
        S = matrix_sqrt(W)
        assert np.allclose(S @ S, W, atol=1e-9)
        assert np.allclose(S, S.T)


def test_matrix_sqrt_rejects_indefinite():
    with pytest.raises(ValueError):
        matrix_sqrt(np.diag([1.0, -0.5]))


def test_matrix_norm_examples():
    M = np.array([[1.0, -2.0], [-2.0, 1.0]])
    assert matrix_norm(M, "entry_l1") == pytest.approx(6.0)
    assert matrix_norm(M, "entry_inf") == pytest.approx(2.0)
    assert matrix_norm(np.eye(3), "frobenius") == pytest.approx(np.sqrt(3.0))
    with pytest.raises(ValueError):
        matrix_norm(M, "operator")


def test_matrix_norm_spectral_matches_oracle():
    rng = np.random.default_rng(17)
    for _ in range(10):
        d = int(rng.integers(2, 8))
        M = rng.standard_normal((d, d))
        M = (M + M.T) / 2
        vals, _ = jacobi_eigh(M)
        assert matrix_norm(M, "spectral") == pytest.approx(
            max(abs(vals[0]), abs(vals[-1])), abs=1e-9)
    # negative-dominant case exercises the reflected eigenpair
    A = np.diag([-5.0, 1.0, 2.0])
    assert matrix_norm(A, "spectral") == pytest.approx(5.0)


def test_principal_submatrix_examples():
    assert np.allclose(principal_submatrix(np.diag([1.0, 2.0, 3.0]), [0, 2]),
                       np.diag([1.0, 3.0]))
    M = np.arange(16, dtype=float).reshape(4, 4)
    M = (M + M.T) / 2
    sub = principal_submatrix(M, [1, 3])
    assert sub[0, 0] == M[1, 1]
    assert sub[0, 1] == M[1, 3]
    assert sub[1, 1] == M[3, 3]


def test_principal_submatrix_rejects_bad_index_sets():
    M = np.eye(4)
    with pytest.raises(ValueError):
        principal_submatrix(M, [2, 1])
    with pytest.raises(ValueError):
        principal_submatrix(M, [1, 1])
    with pytest.raises(ValueError):
        principal_submatrix(M, [0, 4])
    with pytest.raises(ValueError):
        principal_submatrix(M, [])


def test_project_l1_ball_matches_bisection_oracle():
    rng = np.random.default_rng(19)
    for _ in range(50):
        n = int(rng.integers(1, 12))
        v = rng.standard_normal(n) * rng.uniform(0.1, 10.0)
        r = float(rng.uniform(0.05, 5.0))
        out = project_l1_ball(v, r)
        ref = project_l1_oracle(v, r)
        assert np.allclose(out, ref, atol=1e-8)
        assert np.abs(out).sum() <= r + 1e-9
        # projection never flips signs or grows entries
        assert np.all(np.abs(out) <= np.abs(v) + 1e-12)
        assert np.all(out * v >= -1e-12)


def test_project_l1_ball_inside_and_degenerate():
    v = np.array([0.2, -0.1])
    assert np.allclose(project_l1_ball(v, 1.0), v)
    assert np.allclose(project_l1_ball(v, 0.0), 0.0)
    with pytest.raises(ValueError):
        project_l1_ball(v, -1.0)


def test_project_l1_ball_matrix_shape():
    rng = np.random.default_rng(23)
    M = rng.standard_normal((3, 3))
    out = project_l1_ball(M, 2.0)
    assert out.shape == (3, 3)
    assert np.abs(out).sum() <= 2.0 + 1e-9
    assert np.allclose(out.ravel(), project_l1_oracle(M.ravel(), 2.0), atol=1e-8)
