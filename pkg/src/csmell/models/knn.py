"""K-nearest-neighbor classifier (Euclidean, k=3 by default).

On L2-normalized rows Euclidean ranking coincides with cosine ranking.
Distance ties resolve to the lower training-row index; vote ties to the
lowest encoded label.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import ModelError


@dataclass
class KnnParams:
    train_X: np.ndarray
    train_y: np.ndarray
    n_neighbors: int
    n_classes: int

    def arrays(self) -> dict[str, np.ndarray]:
        return {"train_X": self.train_X, "train_y": self.train_y}

    @classmethod
    def from_arrays(
        cls, arrays: dict[str, np.ndarray], n_neighbors: int, n_classes: int
    ) -> "KnnParams":
        return cls(
            train_X=arrays["train_X"],
            train_y=arrays["train_y"].astype(np.int64),
            n_neighbors=n_neighbors,
            n_classes=n_classes,
        )


def fit(X: np.ndarray, y: np.ndarray, n_classes: int, n_neighbors: int = 3):
    if n_neighbors > X.shape[0]:
        raise ModelError(
            f"n_neighbors={n_neighbors} exceeds training size {X.shape[0]}"
        )
    return KnnParams(X.copy(), y.copy(), n_neighbors, n_classes), {}


def scores(params: KnnParams, X: np.ndarray) -> np.ndarray:
    """Neighbor vote fractions per class (uncalibrated)."""
    sq_train = np.sum(params.train_X * params.train_X, axis=1)
    votes = np.zeros((X.shape[0], params.n_classes))
    # Chunked distance computation keeps memory bounded on large queries.
    chunk = max(1, int(2e7 // max(len(sq_train), 1)))
    for start in range(0, X.shape[0], chunk):
        Q = X[start : start + chunk]
        d2 = (
            np.sum(Q * Q, axis=1)[:, None]
            + sq_train[None, :]
            - 2.0 * (Q @ params.train_X.T)
        )
        order = np.argsort(d2, axis=1, kind="stable")[:, : params.n_neighbors]
        neighbor_labels = params.train_y[order]
        for row, labs in enumerate(neighbor_labels):
            votes[start + row] = np.bincount(labs, minlength=params.n_classes)
    return votes / params.n_neighbors
