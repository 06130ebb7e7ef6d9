"""Synthetic task builders shared by tests and experiment scripts."""

from __future__ import annotations

import numpy as np

from synthaudit import Dataset


def gaussian_dataset(seed: int, n: int, dim: int, mean=0.0, std=1.0) -> Dataset:
    rng = np.random.default_rng(seed)
    return Dataset(rng.normal(size=(n, dim)) * std + mean)


def two_blobs(seed: int, n_per_class: int = 200, separation: float = 3.0) -> Dataset:
    """Two well-separated Gaussian blobs at (-separation, 0) and (+separation, 0)."""
    rng = np.random.default_rng(seed)
    pts = np.vstack([
        rng.normal(size=(n_per_class, 2)) + (-separation, 0.0),
        rng.normal(size=(n_per_class, 2)) + (separation, 0.0),
    ])
    labels = np.array([0] * n_per_class + [1] * n_per_class)
    return Dataset(pts, labels)


def clump_blobs(seed: int, n_majority: int = 160, n_minority: int = 40,
                clump_std: float = 0.3, clump_at=(2.0, 0.0)) -> Dataset:
    """A broad majority blob plus a tight minority clump: the sweep task.

    The minority clump is the 'private detail' of this task. Its own spread
    (0.3) sits inside the bandwidth sweep, so bootstrap smoothing dissolves the
    clump progressively: a model trained on lightly smoothed data still learns
    a crisp minority concept, while heavier smoothing bleeds majority labels
    into the clump and the inversion attack loses it.
    """
    rng = np.random.default_rng(seed)
    majority = rng.normal(size=(n_majority, 2)) * 1.2
    minority = rng.normal(size=(n_minority, 2)) * clump_std + clump_at
    labels = np.array([0] * n_majority + [1] * n_minority)
    return Dataset(np.vstack([majority, minority]), labels)
