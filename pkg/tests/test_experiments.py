"""Monte Carlo suites: structure, determinism, and small-scale oracles.

Suites get injected samplers wherever the assertion needs exact control
over the drawn matrices; the statistical verdicts themselves are exercised
at desk scale in test_acceptance.py.
"""

import json
import math

import numpy as np
import pytest

from rmlab import (EnsembleSpec, ExperimentConfig, ShiftSpec, compressibility,
                   operator_norm, run_circular_law, run_distance_subspace,
                   run_operator_norm, run_small_sv_counts, run_smallest_sv,
                   run_stieltjes_concentration, run_tail_suite)
from rmlab.errors import DecompositionError, ParameterError
from rmlab.experiments import (FAIL, NOT_APPLICABLE, PASS, _bootstrap_ci,
                               _exclusion_gate, _finalize_verdict, _run_trials,
                               intermediate_range, ratio_profile, thread_count,
                               trial_seed)
from rmlab.reporting import jsonable
from rmlab.spectral import shifted_matrix


def _config(family="ginibre", n=32, trials=6, **kw):
    return ExperimentConfig(ensemble=EnsembleSpec(family=family, n=n, p=kw.pop("p", 2.0)),
                            trials=trials, **kw)


def _fixed_sampler(seed=0):
    def draw(n, trial):
        return np.random.default_rng(seed + 1000 * n + trial).standard_normal((n, n))
    return draw


# ------------------------------------------------------------- plumbing

def test_trial_seed_is_deterministic_and_spread():
    assert trial_seed(7, 64, 3) == trial_seed(7, 64, 3)
    seen = {trial_seed(7, n, t) for n in (32, 64) for t in range(50)}
    assert len(seen) == 100


def test_thread_count_env(monkeypatch):
    monkeypatch.delenv("RMLAB_THREADS", raising=False)
    assert thread_count() == 1
    monkeypatch.setenv("RMLAB_THREADS", "4")
    assert thread_count() == 4
    monkeypatch.setenv("RMLAB_THREADS", "0")
    assert thread_count() == 1
    monkeypatch.setenv("RMLAB_THREADS", "two")
    with pytest.raises(ParameterError):
        thread_count()


def test_run_trials_captures_decomposition_failures():
    def worker(t):
        if t % 3 == 0:
            raise DecompositionError("no convergence")
        return {"trial": t, "x": t * t}

    rows, good = _run_trials(7, worker)
    assert len(rows) == 7
    assert [r["trial"] for r in rows] == list(range(7))
    assert all("error" in rows[t] for t in (0, 3, 6))
    assert len(good) == 4


def test_run_trials_parallel_matches_serial(monkeypatch):
    def worker(t):
        return {"trial": t, "x": t + 1}

    monkeypatch.setenv("RMLAB_THREADS", "1")
    serial, _ = _run_trials(12, worker)
    monkeypatch.setenv("RMLAB_THREADS", "4")
    parallel, _ = _run_trials(12, worker)
    assert serial == parallel


def test_exclusion_gate_threshold():
    assert _exclusion_gate(200, 198)
    assert not _exclusion_gate(200, 197)
    assert _exclusion_gate(8, 8)
    assert not _exclusion_gate(8, 7)  # one loss out of eight is over 1%


def test_finalize_verdict_combinations():
    assert _finalize_verdict([], False, True) == (0, NOT_APPLICABLE)
    assert _finalize_verdict([True, True], True, True) == (0, PASS)
    assert _finalize_verdict([True, False], True, True) == (1, FAIL)
    assert _finalize_verdict([True], True, False) == (1, FAIL)


def test_bootstrap_ci_deterministic_and_ordered():
    data = list(np.arange(20, dtype=float))
    a = _bootstrap_ci(data, lambda v: float(np.mean(v)))
    b = _bootstrap_ci(data, lambda v: float(np.mean(v)))
    assert a == b
    lo, hi = a
    assert lo <= float(np.mean(data)) <= hi


def test_config_validation():
    cfg = _config()
    assert cfg.trials == 6 and cfg.gamma == 0.5 and cfg.alpha == 0.05
    assert cfg.n_list == (32,)
    c2 = _config(n_list=(64, 32, 64))
    assert c2.n_list == (32, 64)
    with pytest.raises(ParameterError):
        _config(alpha=0.0)
    with pytest.raises(ParameterError):
        _config(alpha=2.5)
    with pytest.raises(ParameterError):
        _config(trials=0)


# ------------------------------------------------------- circular law

def test_circular_law_report_structure():
    cfg = _config(n=48, trials=4)
    rep = run_circular_law(cfg, sampler=_fixed_sampler())
    assert rep.name == "circular_law"
    assert len(rep.records) == 4
    assert rep.excluded == 0
    top = rep.summary["sizes"][48]
    assert 0.0 <= top["radial_pooled"] <= 1.2
    assert len(top["potentials"]) == 3  # default probes 0, 0.5, 2
    for pot in top["potentials"]:
        assert pot["abs_err"] >= 0.0
        assert pot["integrability_mean"] >= 2.0
    assert rep.arrays["eigenvalues_n48"].shape == (4 * 48, 4)
    assert rep.arrays["pooled_eigenvalues_n48"].shape == (4 * 48,)
    assert rep.verdict in (PASS, FAIL)


def test_circular_law_potential_sign_convention():
    # mean_log carries the opposite sign of U_n, both reported
    cfg = _config(n=32, trials=3)
    rep = run_circular_law(cfg, sampler=_fixed_sampler(5))
    rec = rep.records[0]["potentials"][0]
    assert rec["U_n"] == pytest.approx(-rec["mean_log"], abs=1e-12)
    pot = rep.summary["sizes"][32]["potentials"][0]
    assert pot["mean_log_mean"] == pytest.approx(-pot["U_n_mean"], abs=1e-12)


def test_circular_law_single_site_not_applicable():
    cfg = ExperimentConfig(ensemble=EnsembleSpec(family="ginibre", n=1),
                           trials=3)
    rep = run_circular_law(cfg, sampler=_fixed_sampler())
    assert rep.verdict == NOT_APPLICABLE


def test_circular_law_deterministic_summary():
    cfg = _config(n=24, trials=3)
    a = run_circular_law(cfg)
    b = run_circular_law(cfg)
    assert json.dumps(jsonable(a.summary), sort_keys=True) == \
        json.dumps(jsonable(b.summary), sort_keys=True)


# ------------------------------------------------------ operator norm

def test_operator_norm_records_match_direct_computation():
    shift = ShiftSpec(z=0.5)
    cfg = _config(n=24, trials=5, shift=shift)
    sampler = _fixed_sampler(3)
    rep = run_operator_norm(cfg, sampler=sampler)
    for rec in rep.records:
        A = sampler(24, rec["trial"])
        expect = operator_norm(shifted_matrix(A, shift))
        assert rec["value"] == pytest.approx(expect, rel=1e-12)
        assert rec["excess"] == pytest.approx(expect - 0.5, rel=1e-9)
    top = rep.summary["sizes"][24]
    assert top["C_hat"] == pytest.approx(
        max(r["excess"] for r in rep.records), rel=1e-12)
    assert rep.summary["effective_radius"] == 0.5


def test_operator_norm_small_gaussian_passes_universal_bound():
    cfg = _config(n=48, trials=10)
    rep = run_operator_norm(cfg)
    assert rep.verdict == PASS
    # at z=0 the norm of A/sqrt(n) sits near 2, far from the budget 6
    assert rep.summary["sizes"][48]["C_hat"] < 4.0


# -------------------------------------------------- smallest singular

def test_smallest_sv_statistics_and_scaling():
    cfg = _config(n=24, trials=12, shift=ShiftSpec(z=0.5))
    rep = run_smallest_sv(cfg, sampler=_fixed_sampler(11))
    for rec in rep.records:
        # scan = sqrt(n) * s_n(unnormalized shift) = n * s_min(normalized)
        assert rec["scan"] == pytest.approx(24 * rec["s_min"], rel=1e-12)
        assert rec["s_min_unnormalized"] == pytest.approx(
            math.sqrt(24) * rec["s_min"], rel=1e-12)
        assert not rec["violation"]  # the floor 24^-6.5 is astronomically small
    top = rep.summary["sizes"][24]
    assert top["violation_freq"] == 0.0
    assert top["threshold"] == pytest.approx(24.0 ** -6.5)
    assert top["C_hat"] >= 0.0
    assert rep.arrays["scan_n24"].shape == (12,)
    assert rep.arrays["singulars_n24"].shape == (12 * 24, 3)
    assert rep.verdict == PASS


# ------------------------------------------------- intermediate ratios

def test_intermediate_range_endpoints():
    assert intermediate_range(256, 0.5).tolist() == list(range(16, 256))
    assert intermediate_range(100, 0.5).tolist() == list(range(10, 100))
    # ceil on a fractional power
    assert intermediate_range(50, 0.5)[0] == 8
    # the window [ceil(n^gamma), n-1] can be empty at tiny n
    assert intermediate_range(2, 0.99).size == 0


def test_ratio_profile_indexing():
    # values sorted descending; ratio at i compares s_{n-i} with i/n
    values = np.array([4.0, 3.0, 2.0, 1.0])  # n = 4, s_1..s_4
    idx, ratios = ratio_profile(values, 0.5)
    assert idx.tolist() == [2, 3]  # ceil(4^0.5) = 2
    # s_{n-i} is values[n-1-i] with 1-based s_k = values[k-1]
    assert ratios[0] == pytest.approx(values[4 - 1 - 2] / (2.0 / 4.0))
    assert ratios[1] == pytest.approx(values[4 - 1 - 3] / (3.0 / 4.0))


def test_small_sv_counts_positive_and_stable():
    cfg = _config(n=64, trials=6, n_list=(32, 64))
    rep = run_small_sv_counts(cfg)
    assert rep.verdict in (PASS, FAIL)
    for n in (32, 64):
        assert rep.summary["sizes"][n]["min_ratio"] > 0.0
    assert rep.summary["stability_ratio"] is not None
    cfg_single = _config(n=32, trials=4)
    rep_single = run_small_sv_counts(cfg_single)
    assert rep_single.summary["stability_ratio"] is None


# --------------------------------------------------------- distances

def test_distance_subspace_chi_square_oracle():
    # Gaussian rows: squared distance to a k-row span is chi-square(n - k)
    cfg = _config(n=64, trials=40)
    rep = run_distance_subspace(cfg)
    by_k = rep.summary["sizes"][64]["by_k"]
    for frac in (0.25, 0.5, 0.75):
        k = int(round(frac * 64))
        stat = by_k[k]
        dof = 64 - k
        se = math.sqrt(2.0 * dof / 40)
        assert abs(stat["mean_sq_distance"] - dof) <= 5.0 * se
        assert stat["rank_deficient_trials"] == 0
        assert stat["ratio_p5"] > 0.1
    assert rep.verdict == PASS
    assert rep.arrays["distances_n64"].shape == (40 * 3, 3)


def test_distance_subspace_clips_k_grid():
    cfg = _config(n=8, trials=3, k_grid=(0.01, 0.99))
    rep = run_distance_subspace(cfg)
    ks = sorted(rep.summary["sizes"][8]["by_k"])
    assert ks == [1, 7]


# ---------------------------------------------------- compressibility

def test_compressibility_of_sparse_and_flat_vectors():
    n = 100
    sparse = np.zeros(n)
    sparse[:5] = 1.0 / math.sqrt(5.0)
    rec = compressibility(sparse, delta=0.1, rho_comp=0.1)
    assert rec.sparse_support == 10
    assert rec.dist_to_sparse == pytest.approx(0.0, abs=1e-15)
    assert rec.is_compressible

    flat = np.ones(n) / math.sqrt(n)
    rec = compressibility(flat, delta=0.1, rho_comp=0.1)
    # tail of 90 coordinates of size 1/10 each: distance sqrt(0.9)
    assert rec.dist_to_sparse == pytest.approx(math.sqrt(0.9), abs=1e-12)
    assert not rec.is_compressible
    assert rec.spread_threshold == pytest.approx(0.1 / math.sqrt(200.0))
    assert rec.spread_count == n  # every coordinate clears the threshold
    assert rec.spread_count >= rec.spread_bound


def test_compressibility_validation():
    with pytest.raises(ParameterError):
        compressibility(np.ones(4), delta=0.5, rho_comp=0.1)  # not unit norm
    with pytest.raises(ParameterError):
        compressibility(np.ones(4) / 2.0, delta=0.1, rho_comp=0.1)  # k < 1
    with pytest.raises(ParameterError):
        compressibility(np.ones(4) / 2.0, delta=1.5, rho_comp=0.1)


# -------------------------------------------------------- concentration

def test_concentration_needs_two_sizes():
    rep = run_stieltjes_concentration(_config(n=32, trials=6))
    assert rep.verdict == NOT_APPLICABLE
    assert rep.summary["decay_ratios"] == []


def test_concentration_reports_decay_ratios():
    cfg = _config(n=64, trials=24, n_list=(32, 64), shift=ShiftSpec(z=0.5))
    rep = run_stieltjes_concentration(cfg)
    assert len(rep.summary["decay_ratios"]) == 1
    assert rep.summary["xi"] == [0.0, 2.0]
    for n in (32, 64):
        entry = rep.summary["sizes"][n]
        assert entry["std"] >= 0.0
        # the transform itself is bounded by 1/Im(xi)
        assert abs(complex(entry["mean_re"], entry["mean_im"])) <= 0.5


# ------------------------------------------------------------- tails

def test_tail_suite_checks_and_artifacts():
    rep = run_tail_suite(_config(n=32, trials=4))
    assert rep.verdict == PASS
    assert abs(rep.summary["laplace_slope"] - math.sqrt(2.0)) <= 0.1
    assert set(rep.summary["small_ball"]) == {
        "ginibre", "laplace_iid", "lp_ball_global", "lp_ball_rows"}
    assert all(v <= 2.0 for v in rep.summary["small_ball"].values())
    assert all(v <= 10.0 for v in rep.summary["domination"].values())
    surv = rep.arrays["laplace_survival"]
    assert surv.shape[1] == 2
    assert np.all(np.diff(surv[:, 1]) <= 0)  # survival decreases in t
    dom_rec = [r for r in rep.records if r["check"] == "domination"][0]
    assert len(dom_rec["quantile_ratios"]["fro"]) == 3
