"""Numba kernels for CART-style tree growing and traversal.

Kept separate so the first call's JIT compilation (cached on disk) is the
only numba-facing surface. All randomness inside the kernels comes from an
explicit splitmix64 state, so trees are reproducible bit-for-bit.
"""
from __future__ import annotations

import numpy as np
from numba import njit

_U64 = np.uint64


@njit(cache=True, nogil=True)
def _splitmix64(state):
    state = state + _U64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return state, z ^ (z >> _U64(31))


@njit(cache=True, nogil=True)
def grow_tree(X, y, n_classes, sample_idx, max_depth, min_leaf, n_try, seed):
    """Grow one tree on X[sample_idx] and return its flat node arrays.

    Splits minimize weighted Gini impurity over ``n_try`` features sampled
    per node; ties are broken toward the lower feature index and lower
    threshold (features are scanned in ascending order, thresholds
    ascending, and only strict improvements are accepted). ``max_depth``
    of -1 means unlimited. Returns (feature, threshold, left, right,
    counts); leaves have feature == -1.
    """
    n_total = sample_idx.shape[0]
    d = X.shape[1]
    max_nodes = 2 * n_total + 1
    feature = np.full(max_nodes, -1, np.int64)
    threshold = np.zeros(max_nodes, np.float64)
    left = np.full(max_nodes, -1, np.int64)
    right = np.full(max_nodes, -1, np.int64)
    counts = np.zeros((max_nodes, n_classes), np.float64)

    idx = sample_idx.copy()
    buf = np.empty(n_total, np.int64)
    feats = np.arange(d)
    vals = np.empty(n_total, np.float64)
    left_cnt = np.empty(n_classes, np.float64)
    stack = np.empty((max_nodes, 4), np.int64)  # node, start, end, depth
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = n_total
    stack[0, 3] = 0
    top = 1
    n_nodes = 1
    state = _U64(seed) ^ _U64(0x5851F42D4C957F2D)

    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        depth = stack[top, 3]
        n = end - start
        cnt = counts[node]
        for i in range(start, end):
            cnt[y[idx[i]]] += 1.0
        n_max = 0.0
        for c in range(n_classes):
            if cnt[c] > n_max:
                n_max = cnt[c]
        if n_max == n or n < 2 * min_leaf or (max_depth >= 0 and depth >= max_depth):
            continue

        for j in range(n_try):
            state, rnd = _splitmix64(state)
            k = j + int(rnd % _U64(d - j))
            tmp = feats[j]
            feats[j] = feats[k]
            feats[k] = tmp
        chosen = np.sort(feats[:n_try])

        inv_n = 1.0 / n
        g_parent = 1.0
        for c in range(n_classes):
            g_parent -= (cnt[c] * inv_n) ** 2
        best_gain = 0.0
        best_f = -1
        best_thr = 0.0
        for jj in range(n_try):
            f = chosen[jj]
            for i in range(n):
                vals[i] = X[idx[start + i], f]
            order = np.argsort(vals[:n], kind="mergesort")
            for c in range(n_classes):
                left_cnt[c] = 0.0
            nl = 0.0
            for pos in range(n - 1):
                i = order[pos]
                left_cnt[y[idx[start + i]]] += 1.0
                nl += 1.0
                v_here = vals[i]
                v_next = vals[order[pos + 1]]
                if v_next <= v_here:
                    continue
                if nl < min_leaf or (n - nl) < min_leaf:
                    continue
                sl = 0.0
                sr = 0.0
                for c in range(n_classes):
                    sl += left_cnt[c] * left_cnt[c]
                    rc = cnt[c] - left_cnt[c]
                    sr += rc * rc
                nr = n - nl
                gain = g_parent - (nl - sl / nl) * inv_n - (nr - sr / nr) * inv_n
                if gain > best_gain:
                    best_gain = gain
                    best_f = f
                    best_thr = 0.5 * (v_here + v_next)
        if best_f < 0:
            continue

        n_left = 0
        n_right = 0
        for i in range(start, end):
            if X[idx[i], best_f] <= best_thr:
                idx[start + n_left] = idx[i]
                n_left += 1
            else:
                buf[n_right] = idx[i]
                n_right += 1
        for i in range(n_right):
            idx[start + n_left + i] = buf[i]

        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = n_nodes
        right[node] = n_nodes + 1
        stack[top, 0] = n_nodes
        stack[top, 1] = start
        stack[top, 2] = start + n_left
        stack[top, 3] = depth + 1
        stack[top + 1, 0] = n_nodes + 1
        stack[top + 1, 1] = start + n_left
        stack[top + 1, 2] = end
        stack[top + 1, 3] = depth + 1
        top += 2
        n_nodes += 2

    return (
        feature[:n_nodes].copy(),
        threshold[:n_nodes].copy(),
        left[:n_nodes].copy(),
        right[:n_nodes].copy(),
        counts[:n_nodes].copy(),
    )


@njit(cache=True, nogil=True)
def accumulate_tree_proba(feature, threshold, left, right, counts, X, vote, out):
    """Add this tree's per-row class distribution into ``out``.

    ``vote=False`` adds the leaf's class-count proportions, ``vote=True``
    adds a one-hot vote for the leaf's majority class (lowest index wins
    ties).
    """
    n = X.shape[0]
    k = counts.shape[1]
    for i in range(n):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        if vote:
            best = 0
            for c in range(1, k):
                if counts[node, c] > counts[node, best]:
                    best = c
            out[i, best] += 1.0
        else:
            tot = 0.0
            for c in range(k):
                tot += counts[node, c]
            for c in range(k):
                out[i, c] += counts[node, c] / tot
