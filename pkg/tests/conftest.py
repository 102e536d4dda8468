import numpy as np
import pytest
from hypothesis import settings

from mccalib.dataset import LabeledDataset

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


def make_blobs(n_per_class, centers, seed=0, scale=1.0):
    """Gaussian blobs around the given center vectors, one class per center."""
    rng = np.random.default_rng(seed)
    features, labels = [], []
    for c, center in enumerate(centers):
        features.append(rng.normal(loc=center, scale=scale, size=(n_per_class, len(center))))
        labels.extend([c] * n_per_class)
    X = np.vstack(features)
    y = np.asarray(labels)
    perm = rng.permutation(len(y))
    names = tuple(f"c{i}" for i in range(len(centers)))
    return LabeledDataset(X[perm], y[perm], names)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
