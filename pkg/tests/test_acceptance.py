"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s``. The two full-size wave
runs (naive Bayes and random forest) are shared session fixtures; the random
forest run dominates the wall time (a few minutes).
"""
import math

import numpy as np
import pytest

from conftest import make_blobs
from mccalib.calibration import near_isotonic_path, pava
from mccalib.coupling import pairwise_couple
from mccalib.dataset import stratified_kfold
from mccalib.decomposition import Scheme, binary_task_count
from mccalib.harness import (
    ALL_SCENARIOS,
    ClassifierSpec,
    DatasetRecipe,
    ExperimentConfig,
    Scenario,
    emit_table,
    run_experiment,
    run_fold,
)
from mccalib.metrics import log_loss, mse, one_hot
from mccalib.oracles import isotonic_brute_force, t_two_sided_p_quadrature
from mccalib.stats import welch_t_test

WAVEFORM_N = 5000
MASTER_SEED = 20200117


def report(num: int, ok: bool, detail: str) -> None:
    print(f"\n[criterion {num:2d}] {'PASS' if ok else 'FAIL'} - {detail}")


def nb_config(jobs: int = 1) -> ExperimentConfig:
    return ExperimentConfig(
        datasets=(DatasetRecipe(id="waveform", synthetic="waveform", n=WAVEFORM_N, seed=7),),
        classifiers=(ClassifierSpec("nb"),),
        scenarios=ALL_SCENARIOS,
        n_folds=10,
        seed=MASTER_SEED,
        jobs=jobs,
    )


@pytest.fixture(scope="session")
def nb_result():
    return run_experiment(nb_config())


@pytest.fixture(scope="session")
def rf_result():
    cfg = ExperimentConfig(
        datasets=(DatasetRecipe(id="waveform", synthetic="waveform", n=WAVEFORM_N, seed=7),),
        classifiers=(ClassifierSpec("rf"),),
        scenarios=(Scenario.MULTICLASS_RAW, Scenario.OVR_CALIBRATED),
        n_folds=10,
        seed=MASTER_SEED,
    )
    return run_experiment(cfg)


def test_criterion_01_binary_task_counts():
    expected_ovr = {k: k for k in range(2, 13)}
    expected_pairs = {k: k * (k - 1) // 2 for k in range(2, 13)}
    ok = True
    for k in range(2, 13):
        ok = ok and binary_task_count(k, Scheme.ONE_VS_REST) == expected_ovr[k]
        ok = ok and binary_task_count(k, Scheme.ALL_PAIRS) == expected_pairs[k]
    report(1, ok, f"K=2..12 exact; e.g. K=10 -> {binary_task_count(10, Scheme.ONE_VS_REST)} / "
                  f"{binary_task_count(10, Scheme.ALL_PAIRS)}")
    assert ok


def test_criterion_02_metric_closed_forms():
    uniform = np.full((9, 3), 1 / 3)
    labels = one_hot(np.arange(9) % 3, 3)
    ll_u = log_loss(uniform, labels)
    mse_u = mse(uniform, labels)
    ll_perfect = log_loss(labels, labels)
    mse_perfect = mse(labels, labels)
    ok = (
        abs(ll_u - math.log(3)) <= 1e-12
        and abs(mse_u - 2 / 3) <= 1e-12
        and ll_perfect <= 2e-15
        and mse_perfect == 0.0
    )
    report(2, ok, f"uniform K=3: LL={ll_u:.12f} (ln3), MSE={mse_u:.12f} (2/3); "
                  f"perfect: LL={ll_perfect:.1e}, MSE={mse_perfect}")
    assert ok


def test_criterion_03_pava_against_oracle():
    rng = np.random.default_rng(MASTER_SEED)
    worst_fit = 0.0
    worst_path = 0.0
    for _ in range(500):
        n = int(rng.integers(1, 9))
        targets = rng.uniform(0, 1, n)
        weights = rng.uniform(0.25, 4.0, n)
        fit = pava(targets, weights)
        worst_fit = max(worst_fit, float(np.abs(fit - isotonic_brute_force(targets, weights)).max()))
        endpoint = near_isotonic_path(targets, weights)[-1][1]
        worst_path = max(worst_path, float(np.abs(endpoint - fit).max()))
    ok = worst_fit <= 1e-9 and worst_path <= 1e-9
    report(3, ok, f"500 instances: |pava-oracle| <= {worst_fit:.2e}, "
                  f"|path end - pava| <= {worst_path:.2e}")
    assert ok


def test_criterion_04_coupling_recovery():
    rng = np.random.default_rng(MASTER_SEED + 1)
    worst = 0.0
    for _ in range(200):
        k = int(rng.choice([3, 4, 5, 6]))
        p = rng.dirichlet(np.full(k, 2.0))
        p = 0.9 * p + 0.1 / k
        r = np.zeros((k, k))
        for i in range(k):
            for j in range(k):
                if i != j:
                    r[i, j] = p[i] / (p[i] + p[j])
        worst = max(worst, float(np.abs(pairwise_couple(r).probabilities - p).max()))
    sym = np.full((4, 4), 0.5)
    np.fill_diagonal(sym, 0.0)
    sym_err = float(np.abs(pairwise_couple(sym).probabilities - 0.25).max())
    ok = worst <= 1e-6 and sym_err <= 1e-9
    report(4, ok, f"200 consistent-r recoveries: max err {worst:.2e}; symmetric r: {sym_err:.2e}")
    assert ok


def test_criterion_05_two_class_degeneracy():
    ds = make_blobs(120, [[-1.0, 0.3], [1.0, -0.3]], seed=13)
    cfg = nb_config()
    plan = stratified_kfold(ds, 5, seed=3)
    worst = 0.0
    for fold in range(5):
        base = run_fold(ds, plan, fold, ClassifierSpec("nb"), Scenario.MULTICLASS_RAW, cfg, "bin")
        for scenario in (Scenario.OVR_RAW, Scenario.ALLPAIRS_RAW):
            other = run_fold(ds, plan, fold, ClassifierSpec("nb"), scenario, cfg, "bin")
            worst = max(worst, float(np.abs(base.probabilities - other.probabilities).max()))
    ok = worst <= 1e-9
    report(5, ok, f"NB on a binary set: max |route difference| = {worst:.2e} over 5 folds")
    assert ok


def test_criterion_06_welch_reference():
    res = welch_t_test([1, 2, 3, 4, 5], [2, 3, 4, 5, 6])
    oracle_p = t_two_sided_p_quadrature(res.t, res.df)
    same = welch_t_test([0.3, 0.4, 0.5], [0.3, 0.4, 0.5])
    ok = (
        abs(res.t + 1.0) <= 1e-12
        and abs(res.df - 8.0) <= 1e-12
        and abs(res.p_value - 0.3466) <= 1e-3
        and abs(res.p_value - oracle_p) <= 1e-8
        and same.p_value == 1.0
    )
    report(6, ok, f"t={res.t:+.6f}, df={res.df:.1f}, p={res.p_value:.6f} "
                  f"(oracle {oracle_p:.6f}); identical samples p={same.p_value}")
    assert ok


def test_criterion_07_nb_waveform_directional(nb_result):
    base = nb_result.result_for("waveform", "nb", Scenario.MULTICLASS_RAW)
    cal = nb_result.result_for("waveform", "nb", Scenario.OVR_CALIBRATED)
    ll_raw, ll_cal = base.mean_ll, cal.mean_ll
    drop = 1.0 - ll_cal / ll_raw
    p = nb_result.comparisons[("waveform", "nb", Scenario.OVR_CALIBRATED, "ll")].p_value
    in_window = 1.2 <= ll_raw <= 1.9
    drop_ok = drop >= 0.30 and p < 0.05
    mse_ok = cal.mean_mse < base.mean_mse
    report(
        7,
        in_window and drop_ok and mse_ok,
        f"raw LL={ll_raw:.3f} in [1.2,1.9]: {in_window}; "
        f"calibrated LL={ll_cal:.3f} (drop {drop:.1%}, p={p:.1e}): {drop_ok}; "
        f"MSE {cal.mean_mse:.3f} < {base.mean_mse:.3f}: {mse_ok}",
    )
    assert drop_ok, f"calibration must cut LL by >=30% significantly (drop {drop:.1%}, p={p})"
    assert mse_ok, "calibrated MSE must beat the multi-class raw MSE"
    # The window below presumes a log-loss variant that also scores the
    # non-true-class columns (which roughly doubles the value on K=3 wave
    # data). The per-observation true-class log loss implemented here lands
    # near 0.8 for any sound Gaussian NB on this generator, so this bound
    # cannot be met without changing the metric definition fixed by
    # criterion 2. Kept faithful; expected to fail.
    assert in_window, f"mean LL {ll_raw:.3f} outside [1.2, 1.9]"


def test_criterion_08_rf_waveform_directional(rf_result):
    base = rf_result.result_for("waveform", "rf", Scenario.MULTICLASS_RAW)
    cal = rf_result.result_for("waveform", "rf", Scenario.OVR_CALIBRATED)
    ok = cal.mean_mse <= base.mean_mse
    report(8, ok, f"RF OvR calibrated MSE {cal.mean_mse:.4f} <= raw {base.mean_mse:.4f}")
    assert ok


def test_criterion_09_byte_identical_tables(nb_result):
    rerun = run_experiment(nb_config(jobs=4))
    ok = True
    detail = []
    for fmt in ("csv", "markdown"):
        a = emit_table(nb_result, fmt)
        b = emit_table(rerun, fmt)
        ok = ok and a == b
        detail.append(f"{fmt}: {'identical' if a == b else 'DIFFERENT'}")
    report(9, ok, f"two runs (jobs=1 vs jobs=4): {', '.join(detail)}")
    assert ok


def test_criterion_10_timing_instrumentation(nb_result, rf_result):
    rf_cal = rf_result.result_for("waveform", "rf", Scenario.OVR_CALIBRATED)
    nb_cal = nb_result.result_for("waveform", "nb", Scenario.OVR_CALIBRATED)
    rf_per_task = float(np.mean(rf_cal.calibration_seconds_per_task))
    nb_per_task = float(np.mean(nb_cal.calibration_seconds_per_task))
    # reference range 4.36-5.13 s per binary problem, one order of magnitude slack
    low, high = 4.36 / 10.0, 5.13 * 10.0
    ok = low <= rf_per_task <= high
    report(
        10,
        ok,
        f"per-task calibration: rf {rf_per_task:.2f}s in [{low:.2f}, {high:.1f}]: {ok} "
        f"(nb {nb_per_task:.3f}s reported for reference)",
    )
    assert ok
