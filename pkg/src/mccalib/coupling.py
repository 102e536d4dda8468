"""Recombining binary probabilities into a multi-class probability vector."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidEstimatesError

_R_CLAMP = 1e-9


@dataclass(frozen=True)
class CouplingResult:
    probabilities: np.ndarray
    converged: bool
    iterations: int


def normalize_combine(scores) -> np.ndarray:
    """Divide one-vs-rest positive scores by their sum.

    An all-zero score vector maps to the uniform distribution, the only
    symmetric choice when every binary calibrator emits 0.
    """
    s = np.asarray(scores, dtype=np.float64)
    if s.ndim != 1 or len(s) < 2:
        raise ValueError("scores must be a vector of length >= 2")
    if s.min() < -1e-12 or s.max() > 1.0 + 1e-12:
        raise ValueError(f"scores outside [0, 1]: [{s.min()}, {s.max()}]")
    s = np.clip(s, 0.0, 1.0)
    total = s.sum()
    if total <= 0.0:
        return np.full(len(s), 1.0 / len(s))
    return s / total


def validate_pairwise(r, tol: float = 1e-9) -> np.ndarray:
    """Check r[i][j] in [0,1] and r[j][i] = 1 - r[i][j] (diagonal ignored)."""
    r = np.asarray(r, dtype=np.float64)
    if r.ndim != 2 or r.shape[0] != r.shape[1] or r.shape[0] < 2:
        raise InvalidEstimatesError(f"pairwise matrix must be KxK with K >= 2, got {r.shape}")
    off = ~np.eye(len(r), dtype=bool)
    if r[off].min() < -tol or r[off].max() > 1.0 + tol:
        raise InvalidEstimatesError("pairwise estimates outside [0, 1]")
    asym = np.abs(r + r.T - 1.0)[off].max()
    if asym > tol:
        raise InvalidEstimatesError(f"r[j][i] != 1 - r[i][j] (max deviation {asym:.3g})")
    return r


def pairwise_couple(r, tol: float = 1e-10, max_iter: int = 1000) -> CouplingResult:
    """Couple pairwise conditional estimates into class probabilities.

    Minimizes sum_{i<j} (r[j][i]*p_i - r[i][j]*p_j)^2 over the probability
    simplex (the second method of Wu, Lin & Weng 2004) with their fixed-point
    sweep: each coordinate update is followed by renormalization, and the
    iteration stops once successive probability vectors differ by less than
    ``tol`` in max norm. Estimates are clamped away from exact 0/1 first so
    no class becomes an absorbing state.
    """
    r = validate_pairwise(r)
    k = len(r)
    r = np.clip(r, _R_CLAMP, 1.0 - _R_CLAMP)
    np.fill_diagonal(r, 0.0)

    # quadratic form Q with p'Qp equal to the coupling objective
    q = -r.T * r
    np.fill_diagonal(q, (r**2).sum(axis=0))

    p = np.full(k, 1.0 / k)
    qp = q @ p
    pqp = float(p @ qp)
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        p_prev = p.copy()
        for t in range(k):
            diff = (-qp[t] + pqp) / q[t, t]
            p[t] += diff
            pqp = (pqp + diff * (diff * q[t, t] + 2.0 * qp[t])) / (1.0 + diff) ** 2
            qp = (qp + diff * q[:, t]) / (1.0 + diff)
            p /= 1.0 + diff
        if np.abs(p - p_prev).max() < tol:
            converged = True
            break
    p = np.clip(p, 0.0, None)
    p /= p.sum()
    return CouplingResult(p, converged, iterations)
