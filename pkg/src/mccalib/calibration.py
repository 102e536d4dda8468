"""Monte-Carlo calibration data generation (DGG) and (near-)isotonic calibrators.

The calibrator side has two layers: plain isotonic regression solved exactly by
pool-adjacent-violators, and a BIC-weighted ensemble over the full nearly
isotonic solution path (ENIR-style, after Naeini & Cooper 2018; path algorithm
after Tibshirani, Hoefling & Tibshirani 2011).
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .decomposition import BinaryTask
from .errors import (
    DegenerateTaskError,
    EmptyPoolError,
    InsufficientDataError,
    ScoreOutOfRangeError,
)
from .seeding import derive_seed, rng_from

_SCORE_SLACK = 1e-12
_LIKELIHOOD_CLAMP = 1e-6


@dataclass(frozen=True)
class CalibrationPoint:
    """One (raw score, empirical positive fraction) pair with a sample weight."""

    score: float
    target: float
    weight: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [0, 1]")
        if not 0.0 <= self.target <= 1.0:
            raise ValueError(f"target {self.target} outside [0, 1]")
        if not self.weight > 0.0:
            raise ValueError(f"weight {self.weight} must be positive")


@dataclass(frozen=True)
class CalibrationMap:
    """Piecewise mapping from raw score to probability.

    Breakpoints are strictly increasing; outside their range the boundary
    value applies. ``interpolation`` is 'linear' (default) or 'step'.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    interpolation: str = "linear"

    def __post_init__(self):
        bp = np.ascontiguousarray(self.breakpoints, dtype=np.float64)
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if bp.ndim != 1 or bp.shape != vals.shape or len(bp) == 0:
            raise ValueError("breakpoints and values must be matching 1-d arrays")
        if len(bp) > 1 and not (np.diff(bp) > 0).all():
            raise ValueError("breakpoints must be strictly increasing")
        if vals.min() < -1e-12 or vals.max() > 1.0 + 1e-12:
            raise ValueError("fitted values must lie in [0, 1]")
        if self.interpolation not in ("linear", "step"):
            raise ValueError(f"unknown interpolation {self.interpolation!r}")
        bp.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", np.clip(vals, 0.0, 1.0))

    def to_dict(self) -> dict:
        return {
            "kind": "map",
            "breakpoints": self.breakpoints.tolist(),
            "values": self.values.tolist(),
            "interpolation": self.interpolation,
        }


@dataclass(frozen=True)
class EnirEnsemble:
    """Calibration maps along the nearly-isotonic path with BIC weights.

    The member fitted at maximal penalty is the isotonic solution; weights
    are positive and sum to one.
    """

    maps: tuple[CalibrationMap, ...]
    bic: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        bic = np.ascontiguousarray(self.bic, dtype=np.float64)
        w = np.ascontiguousarray(self.weights, dtype=np.float64)
        if len(self.maps) == 0 or len(self.maps) != len(bic) or len(bic) != len(w):
            raise ValueError("ensemble needs aligned, nonempty maps/bic/weights")
        if (w <= 0).any() or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be positive and sum to 1")
        bic.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "maps", tuple(self.maps))
        object.__setattr__(self, "bic", bic)
        object.__setattr__(self, "weights", w)

    def to_dict(self) -> dict:
        return {
            "kind": "ensemble",
            "members": [m.to_dict() for m in self.maps],
            "bic": self.bic.tolist(),
            "weights": self.weights.tolist(),
        }


def calibration_to_json(obj: CalibrationMap | EnirEnsemble) -> str:
    return json.dumps(obj.to_dict(), sort_keys=True)


def calibration_from_json(text: str) -> CalibrationMap | EnirEnsemble:
    doc = json.loads(text)
    return _calibration_from_dict(doc)


def _calibration_from_dict(doc: dict) -> CalibrationMap | EnirEnsemble:
    if doc.get("kind") == "map":
        return CalibrationMap(
            np.asarray(doc["breakpoints"], dtype=np.float64),
            np.asarray(doc["values"], dtype=np.float64),
            doc.get("interpolation", "linear"),
        )
    if doc.get("kind") == "ensemble":
        return EnirEnsemble(
            tuple(_calibration_from_dict(m) for m in doc["members"]),
            np.asarray(doc["bic"], dtype=np.float64),
            np.asarray(doc["weights"], dtype=np.float64),
        )
    raise ValueError(f"unknown calibration document kind {doc.get('kind')!r}")


def pava(targets, weights=None) -> np.ndarray:
    """Weighted isotonic least squares via pool-adjacent-violators.

    Returns the nondecreasing fit minimizing sum w_i (t_i - m_i)^2; exact,
    O(n). Inputs are taken in the given (score-sorted) order.
    """
    t = np.asarray(targets, dtype=np.float64)
    n = len(t)
    if n == 0:
        raise EmptyPoolError("pava needs at least one point")
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
    # blocks as parallel stacks: weighted sum, weight, member count
    sums = np.empty(n)
    wts = np.empty(n)
    sizes = np.empty(n, dtype=np.int64)
    top = -1
    for i in range(n):
        top += 1
        sums[top] = t[i] * w[i]
        wts[top] = w[i]
        sizes[top] = 1
        while top > 0 and sums[top - 1] * wts[top] >= sums[top] * wts[top - 1]:
            # previous block mean >= current block mean: merge
            sums[top - 1] += sums[top]
            wts[top - 1] += wts[top]
            sizes[top - 1] += sizes[top]
            top -= 1
    out = np.empty(n)
    pos = 0
    for b in range(top + 1):
        out[pos : pos + sizes[b]] = sums[b] / wts[b]
        pos += sizes[b]
    return out


def near_isotonic_path(targets, weights=None) -> list[tuple[float, np.ndarray]]:
    """Solution path of nearly isotonic regression for growing penalty.

    Solves min 1/2 sum w_i (t_i - b_i)^2 + lam * sum max(b_i - b_{i+1}, 0)
    for every breakpoint lam from 0 up to the first lam whose solution is
    fully monotone. Between breakpoints each fused block's value is
    (S + lam * d) / W where S, W are the block's weighted target sum and
    weight and d in {-1, 0, 1} counts active violations at its borders, so
    blocks only ever merge and the path has at most n events.

    Returns [(lam, fitted values)] with the last entry equal to the
    isotonic fit.
    """
    t = np.asarray(targets, dtype=np.float64)
    n = len(t)
    if n == 0:
        raise EmptyPoolError("path needs at least one point")
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)

    sums = list(t * w)
    wts = list(w.astype(np.float64))
    sizes = [1] * n
    values = [s / wt for s, wt in zip(sums, wts)]
    lam = 0.0
    path: list[tuple[float, np.ndarray]] = []

    def expand() -> np.ndarray:
        return np.repeat(values, sizes)

    while True:
        # fuse adjacent blocks with (numerically) equal values; they can never
        # legally separate again, and an unfused equal pair would need an
        # immediate zero-length path segment anyway
        i = 0
        while i < len(values) - 1:
            scale = max(1.0, abs(values[i]))
            if abs(values[i] - values[i + 1]) <= 1e-12 * scale:
                merged_w = wts[i] + wts[i + 1]
                values[i] = (values[i] * wts[i] + values[i + 1] * wts[i + 1]) / merged_w
                sums[i] += sums[i + 1]
                wts[i] = merged_w
                sizes[i] += sizes[i + 1]
                del values[i + 1], sums[i + 1], wts[i + 1], sizes[i + 1]
                if i > 0:
                    i -= 1
            else:
                i += 1

        path.append((lam, expand()))
        m = len(values)
        if m == 1:
            break
        viol = [values[i] > values[i + 1] for i in range(m - 1)]
        if not any(viol):
            break
        # slope of block i is delta_i / W_i with delta = (violated in) - (violated out)
        delta = [0] * m
        for i in range(m - 1):
            if viol[i]:
                delta[i] -= 1
                delta[i + 1] += 1
        # earliest collision of adjacent block values, each moving linearly in lam;
        # a pair is approaching iff its gap and gap rate have opposite signs
        lam_next = np.inf
        merge_at = -1
        for i in range(m - 1):
            gap = values[i + 1] - values[i]
            rate = delta[i + 1] / wts[i + 1] - delta[i] / wts[i]
            if gap * rate >= 0.0:
                continue
            cross = lam - gap / rate
            if cross < lam_next:
                lam_next = cross
                merge_at = i
        if not np.isfinite(lam_next):  # pragma: no cover - violations always approach
            break
        lam = lam_next
        for i in range(m):
            values[i] = (sums[i] + lam * delta[i]) / wts[i]
        # pin the argmin pair to an exactly shared value so the fuse pass is
        # guaranteed to merge it: every iteration then removes >= 1 block
        meet = (sums[merge_at] + sums[merge_at + 1] + lam * (delta[merge_at] + delta[merge_at + 1])) / (
            wts[merge_at] + wts[merge_at + 1]
        )
        values[merge_at] = meet
        values[merge_at + 1] = meet

    return path


def _as_sorted_arrays(points) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sort by score and pool equal scores into single weighted points."""
    if len(points) == 0:
        raise EmptyPoolError("no calibration points")
    s = np.asarray([p.score for p in points], dtype=np.float64)
    t = np.asarray([p.target for p in points], dtype=np.float64)
    w = np.asarray([p.weight for p in points], dtype=np.float64)
    order = np.argsort(s, kind="mergesort")
    s, t, w = s[order], t[order], w[order]
    uniq, start = np.unique(s, return_index=True)
    if len(uniq) == len(s):
        return s, t, w
    wsum = np.add.reduceat(w, start)
    tsum = np.add.reduceat(w * t, start)
    return uniq, tsum / wsum, wsum


def fit_isotonic(points) -> CalibrationMap:
    """Weighted isotonic regression of targets on scores."""
    s, t, w = _as_sorted_arrays(points)
    return CalibrationMap(s, pava(t, w))


def fit_enir(points) -> EnirEnsemble:
    """BIC-weighted ensemble over the nearly isotonic path.

    Each path solution is scored with BIC = k*ln(n) - 2*LL, where n is the
    number of (grouped) points, k the number of distinct fitted levels, and
    LL the Bernoulli log likelihood of the targets under the fitted values
    (clamped away from 0/1). Member weights are proportional to
    exp(-BIC / 2).
    """
    s, t, w = _as_sorted_arrays(points)
    path = near_isotonic_path(t, w)
    n = len(s)
    maps = []
    bics = np.empty(len(path))
    for i, (_, fit) in enumerate(path):
        maps.append(CalibrationMap(s, np.clip(fit, 0.0, 1.0)))
        p = np.clip(fit, _LIKELIHOOD_CLAMP, 1.0 - _LIKELIHOOD_CLAMP)
        ll = float(np.sum(t * np.log(p) + (1.0 - t) * np.log(1.0 - p)))
        k = len(np.unique(fit))
        bics[i] = k * np.log(n) - 2.0 * ll
    raw = np.exp(-(bics - bics.min()) / 2.0)
    return EnirEnsemble(tuple(maps), bics, raw / raw.sum())


def apply_calibration(calibrator: CalibrationMap | EnirEnsemble, scores):
    """Map raw scores through a fitted calibrator.

    Accepts a scalar or array; linear maps interpolate between breakpoints
    and clamp to the boundary value outside them, ensembles return the
    weighted mean of their members. Scores must lie in [0, 1] up to 1e-12.
    """
    arr = np.asarray(scores, dtype=np.float64)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr)
    if flat.size and (flat.min() < -_SCORE_SLACK or flat.max() > 1.0 + _SCORE_SLACK):
        raise ScoreOutOfRangeError(
            f"scores outside [0, 1]: range [{flat.min()}, {flat.max()}]"
        )
    flat = np.clip(flat, 0.0, 1.0)
    if isinstance(calibrator, EnirEnsemble):
        out = np.zeros_like(flat)
        for weight, member in zip(calibrator.weights, calibrator.maps):
            out += weight * _apply_map(member, flat)
    else:
        out = _apply_map(calibrator, flat)
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


def _apply_map(m: CalibrationMap, scores: np.ndarray) -> np.ndarray:
    if m.interpolation == "linear":
        return np.interp(scores, m.breakpoints, m.values)
    pos = np.searchsorted(m.breakpoints, scores, side="right") - 1
    return m.values[np.clip(pos, 0, len(m.values) - 1)]


def dgg_generate(task: BinaryTask, features: np.ndarray, trainer, *, rounds: int,
                 holdout_fraction: float, seed: int) -> list[CalibrationPoint]:
    """Monte-Carlo cross validation pool of (score, outcome) pairs.

    Each round splits the task's samples, stratified by binary label, into a
    model part and a ``holdout_fraction`` holdout, trains ``trainer`` on the
    model part, and records the positive-class score of every holdout sample
    against its true 0/1 label. All rounds are pooled, giving
    rounds * holdout_size unit-weight points.

    ``trainer(X, y01, seed)`` must return a callable mapping a feature
    matrix to positive-class probabilities.
    """
    if task.is_degenerate:
        raise DegenerateTaskError("task has samples of only one class")
    if not 0.0 < holdout_fraction < 1.0:
        raise ValueError("holdout_fraction must be in (0, 1)")
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    X = features[task.sample_indices]
    y = task.binary_labels
    sides = [np.flatnonzero(y == 0), np.flatnonzero(y == 1)]
    holdout_counts = []
    for side in sides:
        n_side = len(side)
        if n_side < 2:
            raise InsufficientDataError(
                "each class needs >= 2 samples to split off a holdout"
            )
        h = int(round(holdout_fraction * n_side))
        holdout_counts.append(min(max(h, 1), n_side - 1))

    points: list[CalibrationPoint] = []
    for r in range(rounds):
        rng = rng_from(seed, "dgg-split", r)
        holdout_parts, model_parts = [], []
        for side, h in zip(sides, holdout_counts):
            perm = rng.permutation(side)
            holdout_parts.append(perm[:h])
            model_parts.append(perm[h:])
        model_rows = np.concatenate(model_parts)
        holdout_rows = np.concatenate(holdout_parts)
        predictor = trainer(X[model_rows], y[model_rows], derive_seed(seed, "dgg-fit", r))
        scores = np.clip(np.asarray(predictor(X[holdout_rows]), dtype=np.float64), 0.0, 1.0)
        for s, lab in zip(scores, y[holdout_rows]):
            points.append(CalibrationPoint(float(s), float(lab)))
    return points


def dgg_group(points, group_size: int) -> list[CalibrationPoint]:
    """Collapse score-sorted runs of ``group_size`` points into binned points.

    Each full group becomes one point at the mean score with the positive
    fraction as target and the group size as weight; a final short group
    keeps its true size. Output is sorted by score and has
    ceil(len(points) / group_size) entries.
    """
    if len(points) == 0:
        raise EmptyPoolError("cannot group an empty pool")
    if group_size < 1:
        raise ValueError("group_size must be >= 1")
    s = np.asarray([p.score for p in points], dtype=np.float64)
    t = np.asarray([p.target for p in points], dtype=np.float64)
    w = np.asarray([p.weight for p in points], dtype=np.float64)
    order = np.argsort(s, kind="mergesort")
    s, t, w = s[order], t[order], w[order]
    grouped = []
    for start in range(0, len(s), group_size):
        sl = slice(start, start + group_size)
        wsum = float(w[sl].sum())
        grouped.append(
            CalibrationPoint(
                score=float(np.average(s[sl], weights=w[sl])),
                target=float(np.average(t[sl], weights=w[sl])),
                weight=wsum,
            )
        )
    return grouped
