"""CART-style binary decision tree minimizing Gini impurity.

Split candidates are midpoints between consecutive sorted unique values
of each feature.  Growth stops at a pure node, at ``max_depth`` or when
fewer than ``min_samples_split`` samples remain; leaves carry the
majority label (ties to the lowest label).  Tie-breaking between equally
good splits: lowest feature index, then lowest threshold, so training is
deterministic without any randomness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import VectorDataset, check_features, majority_label
from .spec import ClassifierSpec

__all__ = ["TreeNode", "TreeModel", "fit_tree"]


@dataclass(frozen=True)
class TreeNode:
    """Internal split (feature, threshold, children) or leaf (label)."""

    label: int | None = None
    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.label is not None


@dataclass(frozen=True)
class TreeModel:
    spec: ClassifierSpec
    class_labels: np.ndarray
    root: TreeNode
    n_features: int

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = check_features(X, self.n_features)
        out = np.empty(X.shape[0], dtype=np.int64)
        for i, row in enumerate(X):
            node = self.root
            while not node.is_leaf:
                node = node.left if row[node.feature] <= node.threshold else node.right
            out[i] = node.label
        return out


def _gini(labels: np.ndarray) -> float:
    _, counts = np.unique(labels, return_counts=True)
    p = counts / labels.size
    return 1.0 - float(np.sum(p * p))


def _best_split(X: np.ndarray, y: np.ndarray) -> tuple[int, float] | None:
    n = y.size
    best = None  # (weighted_gini, feature, threshold)
    for feature in range(X.shape[1]):
        column = X[:, feature]
        uniques = np.unique(column)
        if uniques.size < 2:
            continue
        for lo, hi in zip(uniques[:-1], uniques[1:]):
            threshold = (lo + hi) / 2.0
            mask = column <= threshold
            n_left = int(mask.sum())
            weighted = (
                n_left * _gini(y[mask]) + (n - n_left) * _gini(y[~mask])
            ) / n
            key = (weighted, feature, threshold)
            if best is None or key < best:
                best = key
    if best is None:
        return None
    return best[1], best[2]


def _grow(X: np.ndarray, y: np.ndarray, depth: int, spec: ClassifierSpec) -> TreeNode:
    if (
        np.unique(y).size == 1
        or depth >= spec["max_depth"]
        or y.size < spec["min_samples_split"]
    ):
        return TreeNode(label=majority_label(y))
    split = _best_split(X, y)
    if split is None:
        return TreeNode(label=majority_label(y))
    feature, threshold = split
    mask = X[:, feature] <= threshold
    return TreeNode(
        feature=feature,
        threshold=threshold,
        left=_grow(X[mask], y[mask], depth + 1, spec),
        right=_grow(X[~mask], y[~mask], depth + 1, spec),
    )


def fit_tree(spec: ClassifierSpec, data: VectorDataset, seed: int) -> TreeModel:
    if data.n_samples < 2:
        raise ValueError("tree needs at least two training samples")
    class_labels = np.unique(data.labels)
    if class_labels.size < 2:
        raise ValueError("tree needs at least two classes")
    root = _grow(data.features, data.labels, 0, spec)
    return TreeModel(
        spec=spec,
        class_labels=class_labels,
        root=root,
        n_features=data.n_features,
    )
