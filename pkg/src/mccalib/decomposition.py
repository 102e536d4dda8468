"""One-vs-rest and all-pairs reductions of a K-class problem to binary tasks."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dataset import LabeledDataset
from .errors import TooFewClassesError


class Scheme(str, Enum):
    ONE_VS_REST = "ovr"
    ALL_PAIRS = "pairs"


@dataclass(frozen=True)
class BinaryTask:
    """A relabeled view of the parent dataset for one binary subproblem.

    ``sample_indices`` index into the parent dataset (no feature copies);
    ``binary_labels[i]`` is 1 iff the sample's original label equals
    ``positive_class``.
    """

    scheme: Scheme
    positive_class: int
    negative_classes: frozenset[int]
    sample_indices: np.ndarray
    binary_labels: np.ndarray

    def __post_init__(self):
        idx = np.ascontiguousarray(self.sample_indices, dtype=np.int64)
        lab = np.ascontiguousarray(self.binary_labels, dtype=np.int64)
        idx.setflags(write=False)
        lab.setflags(write=False)
        object.__setattr__(self, "sample_indices", idx)
        object.__setattr__(self, "binary_labels", lab)

    @property
    def is_degenerate(self) -> bool:
        """True when the task's slice contains only one of the two sides."""
        if len(self.binary_labels) == 0:
            return True
        return bool(self.binary_labels.min() == self.binary_labels.max())

    @property
    def positive_fraction(self) -> float:
        return float(self.binary_labels.mean()) if len(self.binary_labels) else 0.0


def binary_task_count(n_classes: int, scheme: Scheme) -> int:
    """K tasks for one-vs-rest, K(K-1)/2 for all pairs."""
    if n_classes < 2:
        raise TooFewClassesError(f"need at least 2 classes, got {n_classes}")
    if scheme == Scheme.ONE_VS_REST:
        return n_classes
    if scheme == Scheme.ALL_PAIRS:
        return n_classes * (n_classes - 1) // 2
    raise ValueError(f"unknown scheme {scheme!r}")


def build_ovr_tasks(ds: LabeledDataset) -> list[BinaryTask]:
    """One task per class, each over the whole dataset."""
    if ds.n_classes < 2:
        raise TooFewClassesError(f"need at least 2 classes, got {ds.n_classes}")
    all_idx = np.arange(ds.n_samples, dtype=np.int64)
    tasks = []
    for c in range(ds.n_classes):
        tasks.append(
            BinaryTask(
                scheme=Scheme.ONE_VS_REST,
                positive_class=c,
                negative_classes=frozenset(range(ds.n_classes)) - {c},
                sample_indices=all_idx,
                binary_labels=(ds.labels == c).astype(np.int64),
            )
        )
    return tasks


def build_allpairs_tasks(ds: LabeledDataset) -> list[BinaryTask]:
    """One task per unordered class pair (i, j), i < j, with i positive.

    Each task is restricted to the samples of its two classes, so the union
    of task sizes is sum over pairs of (n_i + n_j).
    """
    if ds.n_classes < 2:
        raise TooFewClassesError(f"need at least 2 classes, got {ds.n_classes}")
    tasks = []
    for i in range(ds.n_classes):
        for j in range(i + 1, ds.n_classes):
            mask = (ds.labels == i) | (ds.labels == j)
            idx = np.flatnonzero(mask)
            tasks.append(
                BinaryTask(
                    scheme=Scheme.ALL_PAIRS,
                    positive_class=i,
                    negative_classes=frozenset({j}),
                    sample_indices=idx,
                    binary_labels=(ds.labels[idx] == i).astype(np.int64),
                )
            )
    return tasks
