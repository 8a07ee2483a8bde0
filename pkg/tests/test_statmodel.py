import math

import numpy as np
import pytest

from spcakit.sdp import CgalConfig
from spcakit.statmodel import (
    NOISE_KINDS,
    PERTURBATION_KINDS,
    ModelSpec,
    deterministic_robustness_check,
    error_decomposition,
    gen_model,
    n_star,
    ratio_experiment,
    recovery_metrics,
    sample_size_threshold,
)


def base_spec(**kw):
    args = dict(d=6, k=2, n=50)
    args.update(kw)
    return ModelSpec(**args)


def test_spec_validation():
    with pytest.raises(ValueError):
        base_spec(k=0)
    with pytest.raises(ValueError):
        base_spec(k=7)
    with pytest.raises(ValueError):
        base_spec(n=0)
    with pytest.raises(ValueError):
        base_spec(sigma2=0.0)
    with pytest.raises(ValueError):
        base_spec(spike_gap=-1.0)
    with pytest.raises(ValueError):
        base_spec(noise_kind="poisson")
    with pytest.raises(ValueError):
        base_spec(perturbation_kind="worst_case")
    with pytest.raises(ValueError):
        base_spec(spike_floor=0.9)  # flat spike entries are 1/sqrt(2)
    assert base_spec(spike_floor=0.7).spike_min_entry == pytest.approx(1 / math.sqrt(2))


def test_gen_model_covariance_structure():
    spec = base_spec(sigma2=0.5, spike_gap=2.0)
    inst = gen_model(spec, seed=0)
    v = inst.v
    assert np.allclose(v[:2], 1 / math.sqrt(2))
    assert np.all(v[2:] == 0.0)
    # Sigma has eigenvalue sigma2 + gap on the spike, sigma2 elsewhere
    assert np.allclose(inst.Sigma @ v, (0.5 + 2.0) * v)
    w = np.zeros(6)
    w[2] = 1.0
    assert np.allclose(inst.Sigma @ w, 0.5 * w)
    assert inst.A.shape == (6, 6)
    assert np.allclose(inst.A, (inst.B + inst.M).T @ (inst.B + inst.M))


def test_gen_model_deterministic():
    spec = base_spec()
    a = gen_model(spec, seed=9)
    b = gen_model(spec, seed=9)
    assert np.array_equal(a.A, b.A)
    assert np.array_equal(a.B, b.B)
    c = gen_model(spec, seed=10)
    assert not np.array_equal(a.A, c.A)


def test_noise_kinds_have_unit_variance():
    for kind in NOISE_KINDS:
        spec = ModelSpec(d=5, k=1, n=4000, sigma2=1.0, spike_gap=1e-9,
                         noise_kind=kind)
        inst = gen_model(spec, seed=1)
        # with a negligible spike, B entries have variance ~ sigma2
        assert inst.B.var() == pytest.approx(1.0, abs=0.05)
    spec = ModelSpec(d=5, k=1, n=100, noise_kind="rademacher_scaled",
                     spike_gap=1e-9)
    G = gen_model(spec, seed=2).B
    assert set(np.round(np.unique(np.abs(G)), 6)) <= {1.0}
    spec = ModelSpec(d=5, k=1, n=100, noise_kind="uniform_scaled", spike_gap=1e-9)
    G = gen_model(spec, seed=3).B
    assert np.max(np.abs(G)) <= math.sqrt(3.0) + 1e-9


def test_perturbation_kinds_respect_column_bound():
    assert set(PERTURBATION_KINDS) == {"zero", "constant_column", "random_bounded"}
    spec = base_spec(perturbation_kind="zero", perturbation_column_bound=0.7)
    assert np.all(gen_model(spec, seed=0).M == 0.0)

    spec = base_spec(perturbation_kind="constant_column", perturbation_column_bound=0.7)
    M = gen_model(spec, seed=0).M
    assert np.allclose(np.linalg.norm(M, axis=0), 0.7)
    assert np.allclose(M, M[:, [0]] @ np.ones((1, 6)))
    assert np.linalg.matrix_rank(M) == 1

    spec = base_spec(perturbation_kind="random_bounded", perturbation_column_bound=0.7)
    M = gen_model(spec, seed=0).M
    norms = np.linalg.norm(M, axis=0)
    assert np.max(norms) == pytest.approx(0.7, abs=1e-12)
    assert np.all(norms <= 0.7 + 1e-12)


def test_error_decomposition_definition_and_concentration():
    spec = base_spec(n=2000)
    inst = gen_model(spec, seed=4)
    E, e_inf = error_decomposition(inst)
    assert np.allclose(E, inst.A - 2000 * inst.Sigma)
    assert e_inf == pytest.approx(np.max(np.abs(E)))
    # per-sample error shrinks as n grows
    small = gen_model(base_spec(n=20), seed=4)
    _, e_small = error_decomposition(small)
    assert e_inf / 2000 < e_small / 20


def test_sample_size_threshold_branches():
    # the log d floor dominates when everything else is negligible
    val = sample_size_threshold(d=100, k=1, sigma2=1e-6, b=0.0, gap=1e6,
                                a=2.0, max_var=1.0, scale_const=1e-12)
    assert val == pytest.approx(math.log(100.0))
    # the 4 / a^2 floor
    val = sample_size_threshold(d=3, k=1, sigma2=1e-6, b=0.0, gap=1e6,
                                a=0.1, max_var=1.0, scale_const=1e-12)
    assert val == pytest.approx(400.0)
    with pytest.raises(ValueError):
        sample_size_threshold(d=3, k=1, sigma2=1.0, b=0.0, gap=0.0, a=0.5,
                              max_var=1.0, scale_const=1.0)


def test_sample_size_threshold_hand_value():
    # d=8, k=2, sigma2=1, b=1/2, gap=2, a=2/5, max_var=3/2, C=3:
    # main = 3 * ((4 log 8 + 2.5) / 0.1024 + 0.5 / 0.32)
    val = sample_size_threshold(d=8, k=2, sigma2=1.0, b=0.5, gap=2.0,
                                a=0.4, max_var=1.5, scale_const=3.0)
    expected = 3.0 * ((4.0 * math.log(8.0) + 2.5) / 0.1024 + 0.5 / 0.32)
    assert val == pytest.approx(expected, rel=1e-12)
    assert val > 4.0 / 0.16 and val > math.log(8.0)


def test_n_star_uses_spec_parameters():
    spec = base_spec(sigma2=1.0, spike_gap=1.0)
    ref = sample_size_threshold(
        d=6, k=2, sigma2=1.0, b=0.0, gap=1.0, a=1 / math.sqrt(2),
        max_var=1.0 + 0.5, scale_const=2.0)
    assert n_star(spec, scale_const=2.0) == pytest.approx(ref)


def test_recovery_metrics_trivial_cases():
    v = np.zeros(4)
    v[:2] = 1 / math.sqrt(2)
    met = recovery_metrics(np.outer(v, v), v)
    assert met.entry_inf_dist == pytest.approx(0.0)
    assert met.frobenius_dist == pytest.approx(0.0)
    assert met.support_recovered
    assert met.half_level_pass
    assert met.support_estimate == (0, 1)

    d = 5
    e1 = np.zeros(d)
    e1[0] = 1.0
    met = recovery_metrics(np.eye(d) / d, e1, a=1.0)
    assert met.entry_inf_dist == pytest.approx(1.0 - 1.0 / d)
    assert not met.half_level_pass
    assert not met.support_recovered
    assert met.support_estimate == ()


def test_recovery_metrics_validation():
    with pytest.raises(ValueError):
        recovery_metrics(np.eye(2) / 2, np.zeros(3))
    with pytest.raises(ValueError):
        recovery_metrics(np.eye(2) / 2, np.zeros(2))
    with pytest.raises(ValueError):
        recovery_metrics(np.eye(2) / 2, np.array([1.0, 0.0]), a=-1.0)


def test_recovery_improves_with_sample_size():
    spec_small = base_spec(n=25, spike_gap=2.0)
    spec_large = base_spec(n=4000, spike_gap=2.0)
    dists = {}
    for name, spec in [("small", spec_small), ("large", spec_large)]:
        errs = []
        for seed in range(5):
            inst = gen_model(spec, seed=seed)
            vals, vecs = np.linalg.eigh(inst.A / spec.n)
            W = np.outer(vecs[:, -1], vecs[:, -1])
            errs.append(recovery_metrics(W, inst.v).entry_inf_dist)
        dists[name] = np.mean(errs)
    assert dists["large"] < dists["small"]


def robustness_fixture():
    d = 5
    v = np.zeros(d)
    v[:2] = 1 / math.sqrt(2)
    BtB = 3.0 * np.outer(v, v) + 0.5 * (np.eye(d) - np.outer(v, v))
    return d, v, BtB


def test_robustness_check_exact_case():
    d, v, BtB = robustness_fixture()
    chk = deterministic_robustness_check(BtB, BtB, v, 2, np.outer(v, v))
    assert chk.distance == pytest.approx(0.0)
    assert chk.bound == pytest.approx(0.0, abs=1e-12)
    assert chk.passed
    assert chk.entry_error == 0.0
    assert chk.eigengap == pytest.approx(2.5)


def test_robustness_check_perturbed_case():
    d, v, BtB = robustness_fixture()
    rng = np.random.default_rng(79)
    E = rng.uniform(-0.01, 0.01, size=(d, d))
    E = (E + E.T) / 2
    A = BtB + E
    chk = deterministic_robustness_check(A, BtB, v, 2, np.outer(v, v))
    assert chk.entry_error == pytest.approx(np.max(np.abs(E)))
    assert chk.base_term == pytest.approx(2 * chk.entry_error * 2 / 2.5)
    assert chk.passed
    # a far-away W violates the bound for this small a
    chk = deterministic_robustness_check(A, BtB, v, 2, np.eye(d) / d)
    assert not chk.passed
    # extra SDP slack loosens the bound monotonically
    loose = deterministic_robustness_check(A, BtB, v, 2, np.eye(d) / d, sdp_gap=50.0)
    assert loose.bound > chk.bound


def test_robustness_check_validation():
    d, v, BtB = robustness_fixture()
    W = np.outer(v, v)
    with pytest.raises(ValueError):
        deterministic_robustness_check(BtB, BtB, 2 * v, 2, W)
    with pytest.raises(ValueError):
        deterministic_robustness_check(BtB, BtB, v, 1, W)  # not 1-sparse
    with pytest.raises(ValueError):
        deterministic_robustness_check(BtB, np.eye(d), np.eye(d)[0], 1, W)  # no gap
    with pytest.raises(ValueError):
        deterministic_robustness_check(BtB, BtB, v, 2, W, sdp_gap=-1.0)
    w = np.zeros(d)
    w[-1] = 1.0
    with pytest.raises(ValueError):
        deterministic_robustness_check(BtB, BtB, w, 2, W)  # not the top eigvec


def test_ratio_experiment_smoke():
    spec = base_spec(spike_gap=2.0)
    exp = ratio_experiment(spec, oversample=4.0, trials=3, seed=0,
                           scale_const=0.5, cgal=CgalConfig(iterations=60, seed=0))
    assert exp.threshold == pytest.approx(1.0 + 2.0 / 15.0)
    assert exp.n_used == math.ceil(4.0 * n_star(spec, 0.5))
    assert len(exp.ratios) == 3
    assert all(r >= 1.0 - 1e-9 for r in exp.ratios)
    assert 0.0 <= exp.pass_fraction <= 1.0
    rerun = ratio_experiment(spec, oversample=4.0, trials=3, seed=0,
                             scale_const=0.5, cgal=CgalConfig(iterations=60, seed=0))
    assert rerun.ratios == exp.ratios


def test_ratio_experiment_validation():
    spec = base_spec()
    with pytest.raises(ValueError):
        ratio_experiment(spec, oversample=0.5, trials=1, seed=0, scale_const=1.0)
    with pytest.raises(ValueError):
        ratio_experiment(spec, oversample=1.0, trials=0, seed=0, scale_const=1.0)
    big = ModelSpec(d=50, k=25, n=10)
    with pytest.raises(ValueError):
        ratio_experiment(big, oversample=1.0, trials=1, seed=0, scale_const=1.0)


def test_ratio_threshold_values():
    assert 1.0 + 2.0 / (8.0 * math.sqrt(1.0) - 1.0) == pytest.approx(1.2857, abs=5e-5)
    assert 1.0 + 2.0 / (8.0 * math.sqrt(4.0) - 1.0) == pytest.approx(1.1333, abs=5e-5)
