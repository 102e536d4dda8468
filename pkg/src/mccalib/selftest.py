"""Self-contained oracle suite behind the ``selftest`` CLI command.

Each check pits a fast implementation against an independent reference from
:mod:`mccalib.oracles` and prints one pass/fail line.
"""
from __future__ import annotations

import numpy as np

from . import oracles
from .calibration import CalibrationPoint, fit_isotonic, near_isotonic_path, pava
from .classifiers import (
    RFParams,
    fit_gaussian_nb,
    fit_random_forest,
    predict_proba_nb,
    predict_proba_rf,
)
from .coupling import pairwise_couple
from .dataset import LabeledDataset
from .seeding import rng_from
from .stats import two_sided_p, welch_t_test


def _check_pava_vs_brute_force(rng, n_cases=200) -> tuple[bool, str]:
    worst = 0.0
    for _ in range(n_cases):
        n = int(rng.integers(1, 9))
        t = rng.uniform(0, 1, n)
        w = rng.uniform(0.25, 4.0, n)
        worst = max(worst, float(np.abs(pava(t, w) - oracles.isotonic_brute_force(t, w)).max()))
    return worst <= 1e-9, f"max |pava - brute force| = {worst:.2e} over {n_cases} cases"


def _check_path_endpoint(rng, n_cases=100) -> tuple[bool, str]:
    worst = 0.0
    for _ in range(n_cases):
        n = int(rng.integers(1, 25))
        t = rng.uniform(0, 1, n)
        w = rng.uniform(0.25, 4.0, n)
        endpoint = near_isotonic_path(t, w)[-1][1]
        worst = max(worst, float(np.abs(endpoint - pava(t, w)).max()))
    return worst <= 1e-9, f"max |path endpoint - pava| = {worst:.2e} over {n_cases} cases"


def _check_coupling(rng, n_cases=50) -> tuple[bool, str]:
    worst = 0.0
    for _ in range(n_cases):
        k = int(rng.integers(3, 7))
        p = rng.dirichlet(np.full(k, 2.0))
        p = 0.9 * p + 0.1 / k  # keep well inside the simplex
        r = np.zeros((k, k))
        for i in range(k):
            for j in range(k):
                if i != j:
                    r[i, j] = p[i] / (p[i] + p[j])
        worst = max(worst, float(np.abs(pairwise_couple(r).probabilities - p).max()))
    grid = oracles.couple_two_class_grid(0.7)
    two = pairwise_couple(np.array([[0.0, 0.7], [0.3, 0.0]])).probabilities
    ok_two = abs(two[0] - grid) <= 1e-5
    ok = worst <= 1e-6 and ok_two
    return ok, f"consistency error {worst:.2e}; K=2 vs grid oracle diff {abs(two[0]-grid):.2e}"


def _check_welch(rng, n_cases=20) -> tuple[bool, str]:
    res = welch_t_test([1, 2, 3, 4, 5], [2, 3, 4, 5, 6])
    worst = abs(res.p_value - oracles.t_two_sided_p_quadrature(res.t, res.df))
    fixed_ok = abs(res.t + 1.0) <= 1e-12 and abs(res.df - 8.0) <= 1e-12
    for _ in range(n_cases):
        t = float(rng.uniform(-10, 10))
        df = float(rng.integers(1, 31))
        worst = max(worst, abs(two_sided_p(t, df) - oracles.t_two_sided_p_quadrature(t, df)))
    return (
        worst <= 1e-8 and fixed_ok,
        f"t={res.t:+.3f} df={res.df:.1f} p={res.p_value:.4f}; max |p - quadrature| = {worst:.2e}",
    )


def _check_tree_traversal(rng) -> tuple[bool, str]:
    X = rng.normal(size=(80, 4))
    y = (X[:, 0] + 0.5 * X[:, 2] > 0).astype(int)
    ds = LabeledDataset(X, y, ("a", "b"))
    model = fit_random_forest(ds, RFParams(n_trees=1, bootstrap=False, n_features=4), seed=3)
    fast = predict_proba_rf(model, X)
    slow = oracles.tree_predict_reference(model.trees[0], X)
    diff = float(np.abs(fast - slow).max())
    one_hot_ok = bool((fast.argmax(axis=1) == y).all() and fast.max(axis=1).min() == 1.0)
    return diff == 0.0 and one_hot_ok, f"traversal diff {diff:.1e}; pure tree one-hot on train: {one_hot_ok}"


def _check_nb_log_space(rng) -> tuple[bool, str]:
    X = rng.normal(size=(60, 3))
    y = rng.integers(0, 3, size=60)
    y[:3] = [0, 1, 2]
    ds = LabeledDataset(X, y, ("a", "b", "c"))
    model = fit_gaussian_nb(ds)
    diff = float(np.abs(predict_proba_nb(model, X) - oracles.nb_predict_direct(model, X)).max())
    return diff <= 1e-9, f"max |log-space - direct density| = {diff:.2e}"


def _check_isotonic_example() -> tuple[bool, str]:
    pts = [CalibrationPoint(0.1, 0.0), CalibrationPoint(0.5, 1.0), CalibrationPoint(0.9, 0.0)]
    fitted = fit_isotonic(pts).values
    expected = oracles.isotonic_brute_force([0.0, 1.0, 0.0])
    diff = float(np.abs(fitted - expected).max())
    return diff <= 1e-12, f"[0,1,0] -> {fitted.tolist()} (oracle {expected.tolist()})"


CHECKS = (
    ("pava vs brute-force oracle", _check_pava_vs_brute_force),
    ("nearly-isotonic path endpoint", _check_path_endpoint),
    ("isotonic [0,1,0] example", lambda rng: _check_isotonic_example()),
    ("pairwise coupling recovery", _check_coupling),
    ("welch p vs quadrature oracle", _check_welch),
    ("tree traversal oracle", _check_tree_traversal),
    ("nb log-space vs direct density", _check_nb_log_space),
)


def run_selftest(verbose: bool = True) -> bool:
    """Run every oracle check; returns True when all pass."""
    all_ok = True
    rng = rng_from(20200117, "selftest")
    for name, check in CHECKS:
        ok, detail = check(rng)
        all_ok = all_ok and ok
        if verbose:
            print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return all_ok
