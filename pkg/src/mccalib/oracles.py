"""Slow, independent reference implementations used to cross-check the fast paths.

Nothing here shares code with the implementations under test: the isotonic
oracle enumerates level-set partitions, the coupling oracle does grid search,
the t-distribution oracle integrates the density, and the tree oracle walks
node arrays in pure Python.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate


def isotonic_brute_force(targets, weights=None) -> np.ndarray:
    """Exact weighted monotone least-squares fit by exhausting partitions.

    Every nondecreasing step function is piecewise constant on contiguous
    blocks with the weighted block mean as value, so trying all 2^(n-1)
    contiguous partitions and keeping the feasible (nondecreasing means)
    one with least error is exact. Only sensible for n <= ~12.
    """
    t = np.asarray(targets, dtype=np.float64)
    n = len(t)
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
    best_err = np.inf
    best_fit = None
    for mask in range(1 << max(n - 1, 0)):
        bounds = [0]
        for cut in range(n - 1):
            if mask >> cut & 1:
                bounds.append(cut + 1)
        bounds.append(n)
        means = []
        feasible = True
        for a, b in zip(bounds[:-1], bounds[1:]):
            mu = float(np.average(t[a:b], weights=w[a:b]))
            if means and mu < means[-1]:
                feasible = False
                break
            means.append(mu)
        if not feasible:
            continue
        fit = np.empty(n)
        for (a, b), mu in zip(zip(bounds[:-1], bounds[1:]), means):
            fit[a:b] = mu
        err = float(np.sum(w * (t - fit) ** 2))
        if err < best_err - 1e-15:
            best_err = err
            best_fit = fit
    return best_fit


def coupling_objective(r, p) -> float:
    """The pairwise coupling objective sum_{i<j} (r_ji p_i - r_ij p_j)^2."""
    r = np.asarray(r, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    k = len(p)
    total = 0.0
    for i in range(k):
        for j in range(i + 1, k):
            total += (r[j, i] * p[i] - r[i, j] * p[j]) ** 2
    return total


def couple_two_class_grid(r01: float, steps: int = 1_000_000) -> float:
    """Grid-search minimizer p0 of the two-class coupling objective."""
    p0 = np.linspace(0.0, 1.0, steps + 1)
    obj = ((1.0 - r01) * p0 - r01 * (1.0 - p0)) ** 2
    return float(p0[int(np.argmin(obj))])


def t_density(x: float, df: float) -> float:
    log_norm = (
        math.lgamma((df + 1.0) / 2.0)
        - math.lgamma(df / 2.0)
        - 0.5 * math.log(df * math.pi)
    )
    return math.exp(log_norm - (df + 1.0) / 2.0 * math.log1p(x * x / df))


def t_two_sided_p_quadrature(t: float, df: float) -> float:
    """Two-sided p-value by adaptive quadrature of the t density."""
    tail, _ = integrate.quad(t_density, abs(t), np.inf, args=(df,), epsabs=1e-13, epsrel=1e-12)
    return min(1.0, 2.0 * tail)


def tree_predict_reference(tree, X) -> np.ndarray:
    """Pure-Python traversal of one tree's node arrays to leaf proportions."""
    X = np.asarray(X, dtype=np.float64)
    out = np.empty((len(X), tree.counts.shape[1]))
    for i, row in enumerate(X):
        node = 0
        while tree.feature[node] >= 0:
            node = tree.left[node] if row[tree.feature[node]] <= tree.threshold[node] else tree.right[node]
        leaf = tree.counts[node]
        out[i] = leaf / leaf.sum()
    return out


def nb_predict_direct(model, X) -> np.ndarray:
    """Naive Bayes posterior from raw density products (no log space).

    Underflows for many features or extreme inputs; meant only as a
    cross-check on small, tame instances.
    """
    X = np.asarray(X, dtype=np.float64)
    out = np.empty((len(X), model.n_classes))
    for i, row in enumerate(X):
        for c in range(model.n_classes):
            dens = model.priors[c]
            for j in range(model.n_features):
                var = model.variances[c, j]
                dens *= math.exp(-((row[j] - model.means[c, j]) ** 2) / (2.0 * var)) / math.sqrt(
                    2.0 * math.pi * var
                )
            out[i, c] = dens
    return out / out.sum(axis=1, keepdims=True)
