"""Data ingestion, class merging, stratified folds, and the synthetic wave generator."""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np

from .errors import (
    DataFileError,
    EmptyDatasetError,
    OverlappingGroupsError,
    SchemaError,
    TooFewSamplesError,
    UnknownClassError,
)
from .seeding import rng_from

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LabeledDataset:
    """Immutable feature matrix plus dense integer class labels.

    ``labels`` are indices into ``class_names``; encoding order is first
    appearance in the source, so reloading the same file gives the same
    encoding on every platform.
    """

    features: np.ndarray
    labels: np.ndarray
    class_names: tuple[str, ...]
    n_dropped: int = 0

    def __post_init__(self):
        features = np.ascontiguousarray(self.features, dtype=np.float64)
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if features.ndim != 2 or labels.ndim != 1 or len(features) != len(labels):
            raise ValueError("features must be (n, d) aligned with length-n labels")
        if features.size and not np.all(np.isfinite(features)):
            raise ValueError("features contain non-finite values")
        if labels.size and (labels.min() < 0 or labels.max() >= len(self.class_names)):
            raise ValueError("labels outside [0, n_classes)")
        features.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "class_names", tuple(str(c) for c in self.class_names))

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def subset(self, indices) -> "LabeledDataset":
        """Row slice sharing class names; folds may lack some classes."""
        indices = np.asarray(indices)
        return LabeledDataset(self.features[indices], self.labels[indices], self.class_names)


@dataclass(frozen=True)
class FoldPlan:
    """Cross-validation assignment: ``assignments[i]`` is sample i's test fold."""

    n_folds: int
    assignments: np.ndarray
    seed: int

    def __post_init__(self):
        assignments = np.ascontiguousarray(self.assignments, dtype=np.int64)
        assignments.setflags(write=False)
        object.__setattr__(self, "assignments", assignments)

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)


def load_csv(path, label_column, *, delimiter: str = ",", header: bool = True) -> LabeledDataset:
    """Load an RFC-4180-ish CSV into a LabeledDataset.

    ``label_column`` is a header name (requires ``header=True``) or a column
    index. Rows with a missing/unparseable/non-finite cell are dropped and
    counted in ``n_dropped``.
    """
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh, delimiter=delimiter))
    except OSError as exc:
        raise DataFileError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise EmptyDatasetError(f"{path} is empty")

    columns = None
    if header:
        columns = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if isinstance(label_column, str):
        if columns is None:
            raise SchemaError("label column given by name but the file has no header")
        if label_column not in columns:
            raise SchemaError(f"label column {label_column!r} not in header {columns}")
        label_idx = columns.index(label_column)
        width = len(columns)
    else:
        label_idx = int(label_column)
        width = len(columns) if columns is not None else (len(rows[0]) if rows else 0)
        if label_idx < 0:
            label_idx += width
        if not 0 <= label_idx < width:
            raise SchemaError(f"label column index {label_column} out of range for width {width}")

    feature_rows: list[list[float]] = []
    raw_labels: list[str] = []
    dropped = 0
    for row in rows:
        if not row or len(row) != width:
            dropped += 1
            continue
        label = row[label_idx].strip()
        if not label:
            dropped += 1
            continue
        values = []
        ok = True
        for j, cell in enumerate(row):
            if j == label_idx:
                continue
            try:
                v = float(cell)
            except ValueError:
                ok = False
                break
            if not np.isfinite(v):
                ok = False
                break
            values.append(v)
        if not ok:
            dropped += 1
            continue
        feature_rows.append(values)
        raw_labels.append(label)

    if not feature_rows:
        raise EmptyDatasetError(f"{path}: no usable rows ({dropped} dropped)")
    if dropped:
        log.info("%s: dropped %d rows with missing or unparseable cells", path, dropped)

    names: list[str] = []
    index: dict[str, int] = {}
    labels = np.empty(len(raw_labels), dtype=np.int64)
    for i, lab in enumerate(raw_labels):
        if lab not in index:
            index[lab] = len(names)
            names.append(lab)
        labels[i] = index[lab]
    return LabeledDataset(np.asarray(feature_rows, dtype=np.float64), labels, tuple(names), n_dropped=dropped)


def merge_classes(ds: LabeledDataset, groups) -> LabeledDataset:
    """Merge each group of class names into a single class.

    Group members must exist in ``ds`` and groups must be disjoint. The merged
    class keeps the position of its first member (by original class index) and
    is named by joining the member names with '+'. N and the feature matrix
    are untouched.
    """
    groups = [list(dict.fromkeys(str(c) for c in g)) for g in groups]
    name_to_old = {name: i for i, name in enumerate(ds.class_names)}
    seen: set[str] = set()
    for group in groups:
        for name in group:
            if name not in name_to_old:
                raise UnknownClassError(f"class {name!r} not in dataset classes {ds.class_names}")
            if name in seen:
                raise OverlappingGroupsError(f"class {name!r} appears in more than one group")
            seen.add(name)
    if not groups:
        return ds

    group_of: dict[int, int] = {}
    for gi, group in enumerate(groups):
        for name in group:
            group_of[name_to_old[name]] = gi

    old_to_new = np.empty(ds.n_classes, dtype=np.int64)
    new_names: list[str] = []
    group_new_index: dict[int, int] = {}
    for old in range(ds.n_classes):
        gi = group_of.get(old)
        if gi is None:
            old_to_new[old] = len(new_names)
            new_names.append(ds.class_names[old])
        elif gi not in group_new_index:
            group_new_index[gi] = len(new_names)
            members = sorted(groups[gi], key=lambda n: name_to_old[n])
            new_names.append("+".join(members))
            old_to_new[old] = group_new_index[gi]
        else:
            old_to_new[old] = group_new_index[gi]

    return LabeledDataset(ds.features, old_to_new[ds.labels], tuple(new_names), n_dropped=ds.n_dropped)


def stratified_kfold(ds: LabeledDataset, n_folds: int, seed: int) -> FoldPlan:
    """Deterministic stratified fold assignment.

    Per class, indices are shuffled with a stream derived from (seed, class)
    and dealt round-robin starting at fold ``class % n_folds`` (the offset
    spreads the leftover samples of small classes across folds). Any two
    folds then differ by at most one test sample of each class. Classes
    smaller than ``n_folds`` are dealt the same way and simply miss some
    test folds.
    """
    if n_folds < 2:
        raise ValueError("n_folds must be at least 2")
    counts = ds.class_counts()
    if ds.n_samples == 0 or (counts < 1).any():
        bad = [ds.class_names[c] for c in np.flatnonzero(counts < 1)] if ds.n_samples else []
        raise TooFewSamplesError(f"every class needs at least one sample (empty: {bad})")
    assignments = np.empty(ds.n_samples, dtype=np.int64)
    for c in range(ds.n_classes):
        members = np.flatnonzero(ds.labels == c)
        rng_from(seed, "stratify", c).shuffle(members)
        assignments[members] = (np.arange(len(members)) + c) % n_folds
    return FoldPlan(n_folds, assignments, seed)


def _waveform_bases() -> np.ndarray:
    """The three triangular base waves on attribute positions 1..21.

    h1 peaks at position 11, h2 at 15, h3 at 7, each with height 6 and
    slope 1 (the classic CART waveform construction, Breiman et al. 1984).
    """
    m = np.arange(1, 22, dtype=np.float64)
    return np.stack([
        np.maximum(6.0 - np.abs(m - 11.0), 0.0),
        np.maximum(6.0 - np.abs(m - 15.0), 0.0),
        np.maximum(6.0 - np.abs(m - 7.0), 0.0),
    ])


WAVEFORM_BASES = _waveform_bases()
# class c mixes base waves WAVEFORM_CLASS_PAIRS[c]
WAVEFORM_CLASS_PAIRS = ((0, 1), (0, 2), (1, 2))


def generate_waveform(n: int, seed: int, *, noise_scale: float = 1.0) -> LabeledDataset:
    """Synthetic 3-class, 21-attribute wave data.

    Each sample picks a class uniformly, mixes that class's two base waves
    with a U(0,1) convex weight, and adds N(0, noise_scale^2) noise per
    attribute. ``noise_scale=0`` is a test hook that leaves samples exactly
    on the convex combinations.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    rng = rng_from(seed, "waveform")
    labels = rng.integers(0, 3, size=n)
    u = rng.uniform(0.0, 1.0, size=n)
    pairs = np.asarray(WAVEFORM_CLASS_PAIRS)
    a, b = pairs[labels, 0], pairs[labels, 1]
    X = u[:, None] * WAVEFORM_BASES[a] + (1.0 - u)[:, None] * WAVEFORM_BASES[b]
    if noise_scale:
        X = X + noise_scale * rng.standard_normal((n, 21))
    return LabeledDataset(X, labels, ("wave1", "wave2", "wave3"))
