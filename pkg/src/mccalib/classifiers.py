"""Base classifiers emitting multi-class probability estimates: Gaussian naive Bayes and a random forest."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _tree
from .dataset import LabeledDataset
from .errors import DegenerateInputError, DimensionMismatchError
from .seeding import derive_seed

_VAR_SMOOTHING = 1e-9


@dataclass(frozen=True)
class NBModel:
    """Per-class priors and per-class, per-feature Gaussian moments."""

    priors: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        for name in ("priors", "means", "variances"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_classes(self) -> int:
        return len(self.priors)

    @property
    def n_features(self) -> int:
        return self.means.shape[1]


def fit_gaussian_nb(ds: LabeledDataset) -> NBModel:
    """Class frequencies as priors; per-class feature means and variances.

    Variances are floored at 1e-9 times the largest global feature variance
    (or 1e-9 absolute if all features are constant) so constant features
    cannot produce zero-width Gaussians.
    """
    if ds.n_samples == 0:
        raise DegenerateInputError("empty training set")
    counts = ds.class_counts()
    if (counts == 0).any():
        empty = [ds.class_names[c] for c in np.flatnonzero(counts == 0)]
        raise DegenerateInputError(f"classes without samples: {empty}")
    k, d = ds.n_classes, ds.n_features
    priors = counts / counts.sum()
    means = np.empty((k, d))
    variances = np.empty((k, d))
    for c in range(k):
        Xc = ds.features[ds.labels == c]
        means[c] = Xc.mean(axis=0)
        variances[c] = Xc.var(axis=0)
    global_var = float(ds.features.var(axis=0).max()) if ds.n_samples > 1 else 0.0
    floor = _VAR_SMOOTHING * global_var if global_var > 0 else _VAR_SMOOTHING
    return NBModel(priors, means, np.maximum(variances, floor))


def predict_proba_nb(model: NBModel, X) -> np.ndarray:
    """Row-stochastic posterior matrix, computed in log space."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DimensionMismatchError(
            f"expected (n, {model.n_features}) features, got {X.shape}"
        )
    # log joint: log prior + sum of per-feature Gaussian log densities
    log_joint = np.log(model.priors)[None, :] - 0.5 * (
        np.log(2.0 * np.pi * model.variances).sum(axis=1)[None, :]
        + (
            (X[:, None, :] - model.means[None, :, :]) ** 2 / model.variances[None, :, :]
        ).sum(axis=2)
    )
    log_joint -= log_joint.max(axis=1, keepdims=True)
    P = np.exp(log_joint)
    P /= P.sum(axis=1, keepdims=True)
    return P


@dataclass(frozen=True)
class RFParams:
    """Forest hyperparameters; ``n_features=None`` means ceil(sqrt(d)) per split."""

    n_trees: int = 100
    max_depth: int | None = None
    min_leaf: int = 1
    n_features: int | None = None
    bootstrap: bool = True
    vote_leaves: bool = False  # False: average leaf class proportions

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "n_features": self.n_features,
            "bootstrap": self.bootstrap,
            "vote_leaves": self.vote_leaves,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RFParams":
        return cls(**{k: doc[k] for k in doc})


@dataclass(frozen=True)
class DecisionTree:
    """Flat array form: internal nodes carry (feature, threshold, children), every node carries class counts."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray


@dataclass(frozen=True)
class RFModel:
    trees: tuple[DecisionTree, ...]
    params: RFParams
    bootstrap_seeds: tuple[int, ...]
    n_classes: int
    n_features: int


def fit_random_forest(ds: LabeledDataset, params: RFParams = RFParams(), seed: int = 0) -> RFModel:
    """Bagged Gini trees with per-split feature subsampling.

    Per-tree randomness (bootstrap rows and feature subsets) is derived from
    (seed, tree index), so a forest is reproducible regardless of how tree
    training would be scheduled.
    """
    if ds.n_samples == 0:
        raise DegenerateInputError("empty training set")
    if params.n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    X = np.ascontiguousarray(ds.features, dtype=np.float64)
    y = np.ascontiguousarray(ds.labels, dtype=np.int64)
    n, d = X.shape
    n_try = params.n_features if params.n_features else math.ceil(math.sqrt(d))
    n_try = min(max(int(n_try), 1), d)
    max_depth = -1 if params.max_depth is None else int(params.max_depth)
    all_rows = np.arange(n, dtype=np.int64)

    trees = []
    boot_seeds = []
    for t in range(params.n_trees):
        boot_seed = derive_seed(seed, "bootstrap", t)
        boot_seeds.append(boot_seed)
        if params.bootstrap:
            rows = np.random.default_rng(boot_seed).integers(0, n, size=n, dtype=np.int64)
        else:
            rows = all_rows
        node_arrays = _tree.grow_tree(
            X, y, ds.n_classes, rows, max_depth, int(params.min_leaf), n_try,
            derive_seed(seed, "tree", t),
        )
        trees.append(DecisionTree(*node_arrays))
    return RFModel(tuple(trees), params, tuple(boot_seeds), ds.n_classes, d)


def predict_proba_rf(model: RFModel, X) -> np.ndarray:
    """Average the per-tree leaf distributions (or votes) into a row-stochastic matrix."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DimensionMismatchError(
            f"expected (n, {model.n_features}) features, got {X.shape}"
        )
    out = np.zeros((X.shape[0], model.n_classes))
    for tree in model.trees:
        _tree.accumulate_tree_proba(
            tree.feature, tree.threshold, tree.left, tree.right, tree.counts,
            X, model.params.vote_leaves, out,
        )
    out /= len(model.trees)
    return out
