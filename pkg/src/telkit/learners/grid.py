"""Exhaustive grid search with k-fold cross validation.

Folds are contiguous blocks of a seeded shuffle, identical for every
candidate, so two identical specs score identically and the earliest
grid position wins ties.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..seeding import mix_seed
from .base import VectorDataset, accuracy
from .spec import ClassifierSpec

__all__ = ["kfold_indices", "cross_val_accuracy", "grid_search_cv"]


def kfold_indices(
    n_samples: int, folds: int, seed: int
) -> list[np.ndarray]:
    """Validation index blocks: seeded shuffle split into ``folds`` runs."""
    if folds < 2:
        raise ValueError(f"folds must be >= 2, got {folds}")
    if folds > n_samples:
        raise ValueError(
            f"cannot make {folds} nonempty folds from {n_samples} samples"
        )
    perm = np.random.default_rng(seed).permutation(n_samples)
    return [block for block in np.array_split(perm, folds)]


def cross_val_accuracy(
    spec: ClassifierSpec, data: VectorDataset, folds: int, seed: int
) -> float:
    """Mean validation accuracy of ``spec`` over the deterministic folds."""
    from . import fit  # deferred: grid depends on the dispatcher

    blocks = kfold_indices(data.n_samples, folds, seed)
    all_idx = np.arange(data.n_samples)
    scores = []
    for f, val_idx in enumerate(blocks):
        train_idx = np.setdiff1d(all_idx, val_idx)
        model = fit(spec, data.subset(train_idx), mix_seed(seed, f))
        predicted = model.predict(data.features[val_idx])
        scores.append(accuracy(predicted, data.labels[val_idx]))
    return float(np.mean(scores))


def grid_search_cv(
    grid: Sequence[ClassifierSpec], data: VectorDataset, folds: int, seed: int
) -> ClassifierSpec:
    """The grid entry with highest mean CV accuracy (ties: earliest)."""
    if len(grid) == 0:
        raise ValueError("grid must not be empty")
    if len(grid) == 1:
        kfold_indices(data.n_samples, folds, seed)  # still validate folds
        return grid[0]
    best_spec = None
    best_score = -1.0
    for spec in grid:
        score = cross_val_accuracy(spec, data, folds, seed)
        if score > best_score:
            best_score = score
            best_spec = spec
    return best_spec
