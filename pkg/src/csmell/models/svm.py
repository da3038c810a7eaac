"""One-vs-rest linear soft-margin SVM.

Trained by deterministic full-batch subgradient descent on the hinge loss
with L2 regularization (lam = 1 / (c * n)), using the Pegasos step schedule
1/(lam * t) and averaging the iterates across epochs. No shuffling, so runs
are exactly reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class SvmParams:
    weights: np.ndarray  # (V, K) averaged one-vs-rest weight vectors
    bias: np.ndarray  # (K,)

    def arrays(self) -> dict[str, np.ndarray]:
        return {"weights": self.weights, "bias": self.bias}

    @classmethod
    def from_arrays(cls, arrays: dict[str, np.ndarray]) -> "SvmParams":
        return cls(arrays["weights"], arrays["bias"])


def _fit_binary(X: np.ndarray, y_signed: np.ndarray, lam: float, epochs: int):
    n, v = X.shape
    w = np.zeros(v)
    b = 0.0
    w_avg = np.zeros(v)
    b_avg = 0.0
    for t in range(1, epochs + 1):
        margins = y_signed * (X @ w + b)
        violating = margins < 1.0
        gw = lam * w
        gb = 0.0
        if violating.any():
            gw = gw - (y_signed[violating, None] * X[violating]).sum(axis=0) / n
            gb = -float(y_signed[violating].sum()) / n
        eta = 1.0 / (lam * t)
        w = w - eta * gw
        b = b - eta * gb
        w_avg += w
        b_avg += b
    return w_avg / epochs, b_avg / epochs


def fit(X: np.ndarray, y: np.ndarray, n_classes: int, c: float = 1.0, epochs: int = 200):
    n, v = X.shape
    lam = 1.0 / (c * n)
    W = np.zeros((v, n_classes))
    bias = np.zeros(n_classes)
    for k in range(n_classes):
        y_signed = np.where(y == k, 1.0, -1.0)
        W[:, k], bias[k] = _fit_binary(X, y_signed, lam, epochs)
    return SvmParams(W, bias), {"epochs": epochs, "lambda": lam}


def scores(params: SvmParams, X: np.ndarray) -> np.ndarray:
    """Raw one-vs-rest margins; uncalibrated (may be negative)."""
    return X @ params.weights + params.bias
