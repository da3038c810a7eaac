"""Seven classical classifiers behind one train/predict interface.

All models train from first principles on dense (or scipy-sparse) feature
matrices. Ties in predictions always break toward the lowest encoded label.
"""

from __future__ import annotations

import time

import numpy as np

from ..corpus import LabelEncoding
from .base import (
    DEFAULT_HYPERPARAMS,
    KINDS,
    ModelError,
    ModelSpec,
    TrainedModel,
    as_dense,
    softmax,
)
from . import boosting, forest, knn, logistic, naive_bayes, svm, tree
from .io import load_model, save_model

__all__ = [
    "KINDS",
    "DEFAULT_HYPERPARAMS",
    "ModelError",
    "ModelSpec",
    "TrainedModel",
    "train",
    "predict",
    "predict_proba",
    "predict_scores",
    "save_model",
    "load_model",
]

#: Kinds whose predict_proba rows are normalized probabilities.
CALIBRATED_KINDS = frozenset(
    {"naive-bayes", "logistic-regression", "random-forest", "gradient-boosting"}
)


def train(spec: ModelSpec, X, y, encoding: LabelEncoding | None = None) -> TrainedModel:
    """Fit one model; deterministic given spec.seed."""
    X = as_dense(X)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] != y.shape[0]:
        raise ModelError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
    present = np.unique(y)
    if len(present) < 2:
        raise ModelError("training requires at least 2 classes present")
    n_classes = len(encoding) if encoding is not None else int(y.max()) + 1
    if int(y.max()) >= n_classes or int(y.min()) < 0:
        raise ModelError("encoded labels out of range for the given encoding")

    h = spec.resolved()
    started = time.perf_counter()
    if spec.kind == "naive-bayes":
        params, diag = naive_bayes.fit(X, y, n_classes, alpha=h["alpha"])
    elif spec.kind == "logistic-regression":
        params, diag = logistic.fit(
            X, y, n_classes, c=h["c"], max_epochs=h["max_epochs"], tol=h["tol"]
        )
    elif spec.kind == "decision-tree":
        params, diag = tree.fit(
            X, y, n_classes, max_depth=h["max_depth"], min_samples_split=h["min_samples_split"]
        )
    elif spec.kind == "random-forest":
        params, diag = forest.fit(
            X,
            y,
            n_classes,
            seed=spec.seed,
            n_trees=h["n_trees"],
            bootstrap=h["bootstrap"],
            max_features=h["max_features"],
            max_depth=h["max_depth"],
            min_samples_split=h["min_samples_split"],
        )
    elif spec.kind == "svm":
        params, diag = svm.fit(X, y, n_classes, c=h["c"], epochs=h["epochs"])
    elif spec.kind == "gradient-boosting":
        params, diag = boosting.fit(
            X,
            y,
            n_classes,
            n_rounds=h["n_rounds"],
            learning_rate=h["learning_rate"],
            max_depth=h["max_depth"],
        )
    elif spec.kind == "knn":
        params, diag = knn.fit(X, y, n_classes, n_neighbors=h["n_neighbors"])
    else:  # pragma: no cover - guarded by ModelSpec
        raise ModelError(f"unknown kind {spec.kind!r}")
    wall = time.perf_counter() - started

    return TrainedModel(
        kind=spec.kind,
        hyperparams=h,
        params=params,
        encoding=encoding,
        n_features=X.shape[1],
        n_classes=n_classes,
        metadata={
            "n_samples": int(X.shape[0]),
            "n_features": int(X.shape[1]),
            "seed": spec.seed,
            "wall_time_s": wall,
        },
        diagnostics=diag,
        proba_calibrated=spec.kind in CALIBRATED_KINDS,
    )


def predict_scores(model: TrainedModel, X) -> np.ndarray:
    """Per-class score rows; for uncalibrated kinds these are votes/margins."""
    X = as_dense(X)
    model.check_width(X)
    if model.kind == "naive-bayes":
        return naive_bayes.scores(model.params, X)
    if model.kind == "logistic-regression":
        return logistic.scores(model.params, X)
    if model.kind == "decision-tree":
        return tree.scores(model.params, X)
    if model.kind == "random-forest":
        return forest.scores(model.params, X)
    if model.kind == "svm":
        return svm.scores(model.params, X)
    if model.kind == "gradient-boosting":
        return boosting.scores(model.params, X)
    if model.kind == "knn":
        return knn.scores(model.params, X)
    raise ModelError(f"unknown kind {model.kind!r}")  # pragma: no cover


def predict(model: TrainedModel, X) -> np.ndarray:
    """Encoded label per row; ties break to the lowest encoded label."""
    return np.argmax(predict_scores(model, X), axis=1)


def predict_proba(model: TrainedModel, X) -> np.ndarray:
    """Per-class score rows summing to 1 for calibrated kinds.

    svm, knn and decision-tree have no natural probabilities; their
    vote/margin scores are returned as-is and model.proba_calibrated is
    False. The argmax always agrees with predict under the same tie-break.
    """
    X = as_dense(X)
    model.check_width(X)
    if model.kind == "naive-bayes":
        return naive_bayes.proba(model.params, X)
    if model.kind == "logistic-regression":
        return logistic.proba(model.params, X)
    if model.kind == "gradient-boosting":
        return boosting.proba(model.params, X)
    if model.kind == "random-forest":
        return forest.scores(model.params, X)
    return predict_scores(model, X)


def rebuild_params(kind: str, hyperparams: dict, n_classes: int, arrays: dict):
    """Reconstruct a kind-specific parameter object from its stored arrays."""
    if kind == "naive-bayes":
        return naive_bayes.NaiveBayesParams.from_arrays(arrays)
    if kind == "logistic-regression":
        return logistic.LogisticParams.from_arrays(arrays)
    if kind == "decision-tree":
        return tree.DecisionTreeParams.from_arrays(arrays)
    if kind == "random-forest":
        return forest.ForestParams.from_arrays(arrays)
    if kind == "svm":
        return svm.SvmParams.from_arrays(arrays)
    if kind == "gradient-boosting":
        return boosting.BoostingParams.from_arrays(arrays, hyperparams["learning_rate"])
    if kind == "knn":
        return knn.KnnParams.from_arrays(
            arrays, n_neighbors=hyperparams["n_neighbors"], n_classes=n_classes
        )
    raise ModelError(f"unknown kind {kind!r}")
