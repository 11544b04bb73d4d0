"""Model files: canonical-JSON round-trip for every trained model.

The on-disk form is a canonical JSON document (sorted keys, 17
significant digits, which round-trips float64 exactly), so saving the
same model twice produces identical bytes and a loaded model predicts
identically to the original.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .canonical import dump_canonical
from .ensemble import BaggingModel, TelviModel
from .learners import (
    BinarySvm,
    ClassifierSpec,
    KnnModel,
    LogitModel,
    Scaler,
    SvmModel,
    TrainedModel,
    TreeModel,
    TreeNode,
)
from .linalg import PcaModel

__all__ = ["save_model", "load_model", "model_to_dict", "model_from_dict"]

MODEL_FORMAT_VERSION = 1


def _matrix(a: np.ndarray) -> list[list[float]]:
    return [[float(v) for v in row] for row in np.asarray(a, dtype=np.float64)]


def _vector(a: np.ndarray) -> list:
    return [v.item() for v in np.asarray(a)]


def _tree_node_to_dict(node: TreeNode) -> dict[str, Any]:
    if node.is_leaf:
        return {"label": int(node.label)}
    return {
        "feature": int(node.feature),
        "threshold": float(node.threshold),
        "left": _tree_node_to_dict(node.left),
        "right": _tree_node_to_dict(node.right),
    }


def _tree_node_from_dict(payload: dict[str, Any]) -> TreeNode:
    if "label" in payload:
        return TreeNode(label=int(payload["label"]))
    return TreeNode(
        feature=int(payload["feature"]),
        threshold=float(payload["threshold"]),
        left=_tree_node_from_dict(payload["left"]),
        right=_tree_node_from_dict(payload["right"]),
    )


def _scaler_to_dict(scaler: Scaler) -> dict[str, Any]:
    return {"mean": _vector(scaler.mean), "std": _vector(scaler.std)}


def _scaler_from_dict(payload: dict[str, Any]) -> Scaler:
    return Scaler(
        mean=np.asarray(payload["mean"], dtype=np.float64),
        std=np.asarray(payload["std"], dtype=np.float64),
    )


def _learner_to_dict(model: TrainedModel) -> dict[str, Any]:
    spec = model.spec.to_dict()
    labels = _vector(model.class_labels)
    if isinstance(model, KnnModel):
        return {
            "spec": spec,
            "class_labels": labels,
            "train_features": _matrix(model.train_features),
            "train_labels": _vector(model.train_labels),
        }
    if isinstance(model, TreeModel):
        return {
            "spec": spec,
            "class_labels": labels,
            "root": _tree_node_to_dict(model.root),
            "n_features": model.n_features,
        }
    if isinstance(model, LogitModel):
        return {
            "spec": spec,
            "class_labels": labels,
            "scaler": _scaler_to_dict(model.scaler),
            "weights": _matrix(model.weights),
            "bias": _vector(model.bias),
        }
    if isinstance(model, SvmModel):
        return {
            "spec": spec,
            "class_labels": labels,
            "scaler": _scaler_to_dict(model.scaler),
            "n_features": model.n_features,
            "binaries": [
                {
                    "support_vectors": _matrix(b.support_vectors),
                    "dual_coefs": _vector(b.dual_coefs),
                    "bias": float(b.bias),
                }
                for b in model.binaries
            ],
        }
    raise TypeError(f"unknown model type {type(model).__name__}")


def _learner_from_dict(payload: dict[str, Any]) -> TrainedModel:
    spec = ClassifierSpec.from_dict(payload["spec"])
    labels = np.asarray(payload["class_labels"], dtype=np.int64)
    if spec.kind == "knn":
        return KnnModel(
            spec=spec,
            class_labels=labels,
            train_features=np.asarray(payload["train_features"], dtype=np.float64),
            train_labels=np.asarray(payload["train_labels"], dtype=np.int64),
        )
    if spec.kind == "tree":
        return TreeModel(
            spec=spec,
            class_labels=labels,
            root=_tree_node_from_dict(payload["root"]),
            n_features=int(payload["n_features"]),
        )
    if spec.kind == "logit":
        return LogitModel(
            spec=spec,
            class_labels=labels,
            scaler=_scaler_from_dict(payload["scaler"]),
            weights=np.asarray(payload["weights"], dtype=np.float64),
            bias=np.asarray(payload["bias"], dtype=np.float64),
        )
    if spec.kind == "svm":
        return SvmModel(
            spec=spec,
            class_labels=labels,
            scaler=_scaler_from_dict(payload["scaler"]),
            n_features=int(payload["n_features"]),
            binaries=[
                BinarySvm(
                    support_vectors=np.asarray(
                        b["support_vectors"], dtype=np.float64
                    ).reshape(-1, int(payload["n_features"])),
                    dual_coefs=np.asarray(b["dual_coefs"], dtype=np.float64),
                    bias=float(b["bias"]),
                )
                for b in payload["binaries"]
            ],
        )
    raise ValueError(f"unknown learner kind {spec.kind!r}")


def model_to_dict(model) -> dict[str, Any]:
    """Serializable form of a single learner or a whole ensemble."""
    if isinstance(model, TelviModel):
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "type": "telvi",
            "rank": list(model.rank),
            "shape": list(model.shape),
            "base_spec": model.base_spec.to_dict(),
            "class_labels": _vector(model.class_labels),
            "seed": model.seed,
            "base_models": {
                f"{n},{r}": _learner_to_dict(learner)
                for (n, r), learner in model.base_models.items()
            },
        }
    if isinstance(model, BaggingModel):
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "type": "bagging",
            "shape": list(model.shape),
            "base_spec": model.base_spec.to_dict(),
            "class_labels": _vector(model.class_labels),
            "seed": model.seed,
            "bootstrap_seeds": list(model.bootstrap_seeds),
            "pca": {
                "mean": _vector(model.pca.mean),
                "components": _matrix(model.pca.components),
            },
            "estimators": [_learner_to_dict(e) for e in model.estimators],
        }
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "type": "single",
        "model": _learner_to_dict(model),
    }


def model_from_dict(payload: dict[str, Any]):
    version = payload.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version!r}")
    kind = payload.get("type")
    if kind == "telvi":
        base_models = {}
        for key, sub in sorted(payload["base_models"].items()):
            n, r = (int(part) for part in key.split(","))
            base_models[(n, r)] = _learner_from_dict(sub)
        return TelviModel(
            rank=tuple(payload["rank"]),
            shape=tuple(payload["shape"]),
            base_spec=ClassifierSpec.from_dict(payload["base_spec"]),
            base_models=base_models,
            class_labels=np.asarray(payload["class_labels"], dtype=np.int64),
            seed=int(payload["seed"]),
        )
    if kind == "bagging":
        components = np.asarray(payload["pca"]["components"], dtype=np.float64)
        return BaggingModel(
            shape=tuple(payload["shape"]),
            pca=PcaModel(
                mean=np.asarray(payload["pca"]["mean"], dtype=np.float64),
                components=components,
            ),
            base_spec=ClassifierSpec.from_dict(payload["base_spec"]),
            estimators=[_learner_from_dict(e) for e in payload["estimators"]],
            bootstrap_seeds=[int(s) for s in payload["bootstrap_seeds"]],
            class_labels=np.asarray(payload["class_labels"], dtype=np.int64),
            seed=int(payload["seed"]),
        )
    if kind == "single":
        return _learner_from_dict(payload["model"])
    raise ValueError(f"unknown model type {kind!r}")


def save_model(model, path: str | Path) -> None:
    dump_canonical(model_to_dict(model), path)


def load_model(path: str | Path):
    with open(path, "r", encoding="utf-8") as handle:
        return model_from_dict(json.load(handle))
