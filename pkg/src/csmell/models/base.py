"""Model specs and the uniform trained-model artifact."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Mapping

import numpy as np
import scipy.sparse as sp

from ..corpus import LabelEncoding


class ModelError(ValueError):
    pass


KINDS = (
    "naive-bayes",
    "logistic-regression",
    "decision-tree",
    "random-forest",
    "svm",
    "gradient-boosting",
    "knn",
)

# The source protocol only pins "default parameters"; these are the pinned
# conventions, all overridable per spec.
DEFAULT_HYPERPARAMS: dict[str, dict[str, Any]] = {
    "naive-bayes": {"alpha": 1.0},
    "logistic-regression": {"c": 1.0, "max_epochs": 1000, "tol": 1e-6},
    "decision-tree": {"max_depth": None, "min_samples_split": 2},
    "random-forest": {
        "n_trees": 100,
        "bootstrap": True,
        "max_features": "sqrt",
        "max_depth": None,
        "min_samples_split": 2,
    },
    "svm": {"c": 1.0, "epochs": 200},
    "gradient-boosting": {"n_rounds": 100, "learning_rate": 0.1, "max_depth": 3},
    "knn": {"n_neighbors": 3},
}


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    hyperparams: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ModelError(f"unknown model kind {self.kind!r}; expected one of {KINDS}")
        defaults = DEFAULT_HYPERPARAMS[self.kind]
        unknown = sorted(set(self.hyperparams) - set(defaults))
        if unknown:
            raise ModelError(f"{self.kind}: unknown hyperparameters {unknown}")
        merged = {**defaults, **dict(self.hyperparams)}
        if self.kind == "knn" and merged["n_neighbors"] < 1:
            raise ModelError("knn requires n_neighbors >= 1")
        if self.kind == "random-forest" and merged["n_trees"] < 1:
            raise ModelError("random-forest requires n_trees >= 1")
        if self.kind in ("logistic-regression", "svm") and merged["c"] <= 0:
            raise ModelError(f"{self.kind} requires c > 0")
        object.__setattr__(self, "hyperparams", MappingProxyType(merged))

    def resolved(self) -> dict[str, Any]:
        return dict(self.hyperparams)


@dataclass
class TrainedModel:
    """Uniform artifact: a fitted parameter object tagged by algorithm kind."""

    kind: str
    hyperparams: dict[str, Any]
    params: Any
    encoding: LabelEncoding | None
    n_features: int
    n_classes: int
    metadata: dict[str, Any] = field(default_factory=dict)
    diagnostics: dict[str, Any] = field(default_factory=dict)
    proba_calibrated: bool = False

    def check_width(self, X: np.ndarray) -> None:
        if X.shape[1] != self.n_features:
            raise ModelError(
                f"feature width {X.shape[1]} does not match trained width {self.n_features}"
            )


def as_dense(X) -> np.ndarray:
    if sp.issparse(X):
        return np.asarray(X.todense(), dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ModelError(f"expected a 2-D feature matrix, got shape {X.shape}")
    return X


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)
