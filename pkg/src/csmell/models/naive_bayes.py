"""Multinomial naive Bayes with Laplace smoothing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import ModelError, softmax


@dataclass
class NaiveBayesParams:
    class_log_prior: np.ndarray  # (K,)
    feature_log_prob: np.ndarray  # (K, V)

    def arrays(self) -> dict[str, np.ndarray]:
        return {
            "class_log_prior": self.class_log_prior,
            "feature_log_prob": self.feature_log_prob,
        }

    @classmethod
    def from_arrays(cls, arrays: dict[str, np.ndarray]) -> "NaiveBayesParams":
        return cls(arrays["class_log_prior"], arrays["feature_log_prob"])


def fit(X: np.ndarray, y: np.ndarray, n_classes: int, alpha: float = 1.0):
    if (X < 0).any():
        raise ModelError("multinomial naive Bayes requires nonnegative features")
    n, v = X.shape
    counts = np.zeros(n_classes)
    feature_sums = np.zeros((n_classes, v))
    for c in range(n_classes):
        rows = y == c
        counts[c] = rows.sum()
        feature_sums[c] = X[rows].sum(axis=0)
    class_log_prior = np.log(counts / n)
    smoothed = feature_sums + alpha
    feature_log_prob = np.log(smoothed / smoothed.sum(axis=1, keepdims=True))
    params = NaiveBayesParams(class_log_prior, feature_log_prob)
    return params, {}


def scores(params: NaiveBayesParams, X: np.ndarray) -> np.ndarray:
    return X @ params.feature_log_prob.T + params.class_log_prior


def proba(params: NaiveBayesParams, X: np.ndarray) -> np.ndarray:
    return softmax(scores(params, X))
