"""Classifier specifications: kind plus kind-specific hyperparameters."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

__all__ = ["ClassifierSpec", "KINDS"]

KINDS = ("knn", "tree", "logit", "svm")

_DEFAULTS: dict[str, dict[str, Any]] = {
    "knn": {"k": 5, "distance": "euclidean"},
    "tree": {"max_depth": 10, "min_samples_split": 2, "criterion": "gini"},
    "logit": {"l2_penalty": 1e-4, "max_iterations": 500, "learning_rate": 0.5},
    "svm": {
        "kernel": "rbf",
        "C": 1.0,
        "gamma": 0.5,
        "degree": 3,
        "coef0": 1.0,
        "tolerance": 1e-3,
        "max_passes": 10,
    },
}

_INTEGRAL = {"k", "max_depth", "min_samples_split", "max_iterations",
             "degree", "max_passes"}


@dataclass(frozen=True)
class ClassifierSpec:
    """A base-learner recipe.

    Unspecified hyperparameters take documented defaults; unknown keys
    and non-positive numeric values are rejected at construction.
    """

    kind: str
    hyperparameters: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in KINDS:
            raise ValueError(f"unknown classifier kind {self.kind!r}")
        params = dict(_DEFAULTS[kind])
        for key, value in dict(self.hyperparameters).items():
            if key not in params:
                raise ValueError(
                    f"unknown hyperparameter {key!r} for kind {kind!r}"
                )
            params[key] = value
        _validate(kind, params)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "hyperparameters", params)

    def __getitem__(self, key: str) -> Any:
        return self.hyperparameters[key]

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "hyperparameters": dict(self.hyperparameters)}

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "ClassifierSpec":
        return cls(payload["kind"], payload.get("hyperparameters", {}))


def _validate(kind: str, params: dict[str, Any]) -> None:
    for key, value in params.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            continue
        if key in _INTEGRAL:
            if int(value) != value:
                raise ValueError(f"{key} must be an integer, got {value!r}")
            params[key] = int(value)
        if value <= 0:
            raise ValueError(f"{key} must be positive, got {value!r}")
    if kind == "knn" and params["distance"] != "euclidean":
        raise ValueError(f"unsupported distance {params['distance']!r}")
    if kind == "tree":
        if params["criterion"] != "gini":
            raise ValueError(f"unsupported criterion {params['criterion']!r}")
        if params["min_samples_split"] < 2:
            raise ValueError("min_samples_split must be >= 2")
    if kind == "svm" and params["kernel"] not in ("poly", "rbf"):
        raise ValueError(f"unsupported kernel {params['kernel']!r}")
