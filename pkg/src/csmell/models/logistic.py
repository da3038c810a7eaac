"""Multinomial softmax regression trained by full-batch gradient descent.

Objective: mean cross-entropy plus (lam/2) * ||W||_F^2 with lam = 1/c; the
intercept is unpenalized. Steps use Armijo backtracking line search, so the
training loss is non-increasing by construction (and monitored anyway).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import softmax


@dataclass
class LogisticParams:
    weights: np.ndarray  # (V, K)
    bias: np.ndarray  # (K,)

    def arrays(self) -> dict[str, np.ndarray]:
        return {"weights": self.weights, "bias": self.bias}

    @classmethod
    def from_arrays(cls, arrays: dict[str, np.ndarray]) -> "LogisticParams":
        return cls(arrays["weights"], arrays["bias"])


def _log_softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=1, keepdims=True))


def loss(W: np.ndarray, b: np.ndarray, X: np.ndarray, y: np.ndarray, lam: float) -> float:
    logp = _log_softmax(X @ W + b)
    nll = -float(logp[np.arange(len(y)), y].mean())
    return nll + 0.5 * lam * float(np.sum(W * W))


def loss_and_grad(W, b, X, y, lam: float):
    """Returns (loss, dW, db); exposed for finite-difference verification."""
    n = X.shape[0]
    logits = X @ W + b
    logp = _log_softmax(logits)
    p = np.exp(logp)
    onehot = np.zeros_like(p)
    onehot[np.arange(n), y] = 1.0
    diff = (p - onehot) / n
    dW = X.T @ diff + lam * W
    db = diff.sum(axis=0)
    nll = -float(logp[np.arange(n), y].mean())
    return nll + 0.5 * lam * float(np.sum(W * W)), dW, db


def fit(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    c: float = 1.0,
    max_epochs: int = 1000,
    tol: float = 1e-6,
):
    n, v = X.shape
    lam = 1.0 / c
    W = np.zeros((v, n_classes))
    b = np.zeros(n_classes)
    step = 1.0
    converged = False
    losses: list[float] = []
    epoch = 0
    for epoch in range(1, max_epochs + 1):
        current, dW, db = loss_and_grad(W, b, X, y, lam)
        grad_inf = max(float(np.abs(dW).max()), float(np.abs(db).max()))
        if grad_inf < tol:
            converged = True
            break
        g2 = float(np.sum(dW * dW) + np.sum(db * db))
        t = step
        for _ in range(60):
            candidate = loss(W - t * dW, b - t * db, X, y, lam)
            if candidate <= current - 1e-4 * t * g2:
                break
            t *= 0.5
        if candidate > current:
            raise RuntimeError(
                f"logistic regression loss increased at epoch {epoch}: "
                f"{current} -> {candidate}"
            )
        W = W - t * dW
        b = b - t * db
        step = min(t * 2.0, 1e4)
        losses.append(candidate)

    diagnostics = {
        "epochs": epoch,
        "converged": converged,
        "final_loss": losses[-1] if losses else loss(W, b, X, y, lam),
    }
    return LogisticParams(W, b), diagnostics


def scores(params: LogisticParams, X: np.ndarray) -> np.ndarray:
    return X @ params.weights + params.bias


def proba(params: LogisticParams, X: np.ndarray) -> np.ndarray:
    return softmax(scores(params, X))
