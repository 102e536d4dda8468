"""Calibration error metrics over multi-class probability matrices."""
from __future__ import annotations

import numpy as np

from .errors import ShapeMismatchError

LOG_CLAMP = 1e-15  # floor applied to probabilities before taking logs


def one_hot(labels, n_classes: int) -> np.ndarray:
    """N x K 0/1 indicator matrix for integer labels."""
    labels = np.asarray(labels, dtype=np.int64)
    out = np.zeros((len(labels), n_classes), dtype=np.float64)
    out[np.arange(len(labels)), labels] = 1.0
    return out


def _check_shapes(P, Y):
    P = np.asarray(P, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if P.shape != Y.shape or P.ndim != 2 or P.shape[0] == 0:
        raise ShapeMismatchError(f"probabilities {P.shape} vs labels {Y.shape}")
    return P, Y


def log_loss(P, Y) -> float:
    """Mean negative log predicted probability of the true class.

    Probabilities are clamped to [1e-15, 1] before the log, so a confidently
    wrong prediction costs about 34.5 nats instead of infinity.
    """
    P, Y = _check_shapes(P, Y)
    clamped = np.clip(P, LOG_CLAMP, 1.0)
    return float(-np.sum(Y * np.log(clamped)) / P.shape[0])


def mse(P, Y) -> float:
    """Mean over samples of the squared error summed across all K classes.

    This is the multi-class Brier score; it is bounded by 2 and is not
    divided by the class count.
    """
    P, Y = _check_shapes(P, Y)
    return float(np.sum((Y - P) ** 2) / P.shape[0])


def is_row_stochastic(P, tol: float = 1e-9) -> bool:
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 2 or P.size == 0:
        return False
    in_range = bool((P >= -tol).all() and (P <= 1.0 + tol).all())
    return in_range and bool(np.abs(P.sum(axis=1) - 1.0).max() <= tol)


def check_probability_matrix(P, tol: float = 1e-9) -> np.ndarray:
    """Validate entries in [0,1] and unit row sums; returns P unchanged."""
    P = np.asarray(P, dtype=np.float64)
    if not is_row_stochastic(P, tol):
        raise ValueError("matrix is not row-stochastic within tolerance")
    return P
