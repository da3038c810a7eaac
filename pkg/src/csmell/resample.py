"""SMOTE synthetic oversampling, applied to training folds only.

Synthetic rows are interpolations between same-class nearest neighbors and
are deliberately not re-normalized to unit L2: they live between their two
parents in feature space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ._util import subseed


class ResampleError(ValueError):
    pass


@dataclass(frozen=True)
class ResamplePlan:
    """Per-class target counts for an equalize-to-majority resample."""

    targets: dict[int, int]
    k_neighbors: int
    seed: int

    def __post_init__(self) -> None:
        if self.k_neighbors < 1:
            raise ResampleError("k_neighbors must be >= 1")


def _as_dense(X) -> np.ndarray:
    if sp.issparse(X):
        return np.asarray(X.todense(), dtype=np.float64)
    return np.asarray(X, dtype=np.float64)


def plan_equalize(y: np.ndarray, k: int, seed: int) -> ResamplePlan:
    classes, counts = np.unique(y, return_counts=True)
    majority = int(counts.max())
    return ResamplePlan(
        targets={int(c): majority for c in classes}, k_neighbors=k, seed=seed
    )


def smote(
    X,
    y,
    k: int = 5,
    strategy: str = "equalize-to-majority",
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Oversample every minority class up to the majority count.

    Each synthetic sample interpolates a random class member x toward one of
    its k nearest same-class neighbors z (Euclidean, ties to the lower row
    index): x + u * (z - x) with u ~ Uniform(0, 1). Originals are preserved
    verbatim and come first; output is bit-identical for a fixed seed.
    """
    if strategy != "equalize-to-majority":
        raise ResampleError(f"unsupported strategy {strategy!r}")
    if k < 1:
        raise ResampleError("k must be >= 1")
    X = _as_dense(X)
    y = np.asarray(y)
    if X.shape[0] != y.shape[0]:
        raise ResampleError("X and y row counts differ")

    classes, counts = np.unique(y, return_counts=True)
    majority = int(counts.max())

    singletons = [int(c) for c, n in zip(classes, counts) if n == 1 and n < majority]
    if singletons:
        raise ResampleError(
            f"classes with a single sample cannot be oversampled: {singletons}; "
            "drop or duplicate them first"
        )

    synth_rows: list[np.ndarray] = []
    synth_labels: list = []
    for c, n in zip(classes, counts):
        deficit = majority - int(n)
        if deficit == 0:
            continue
        idx = np.flatnonzero(y == c)
        Xc = X[idx]
        k_eff = min(k, int(n) - 1)
        # Pairwise squared Euclidean distances within the class.
        sq = np.sum(Xc * Xc, axis=1)
        d2 = sq[:, None] + sq[None, :] - 2.0 * (Xc @ Xc.T)
        np.fill_diagonal(d2, np.inf)
        # Stable argsort breaks distance ties toward the lower row index.
        neighbor_idx = np.argsort(d2, axis=1, kind="stable")[:, :k_eff]

        rng = np.random.default_rng(subseed(seed, "smote", int(c)))
        for _ in range(deficit):
            i = int(rng.integers(0, len(idx)))
            j = int(neighbor_idx[i, int(rng.integers(0, k_eff))])
            u = rng.random()
            synth_rows.append(Xc[i] + u * (Xc[j] - Xc[i]))
            synth_labels.append(c)

    if synth_rows:
        X_out = np.vstack([X, np.asarray(synth_rows)])
        y_out = np.concatenate([y, np.asarray(synth_labels, dtype=y.dtype)])
    else:
        X_out = X.copy()
        y_out = y.copy()
    return X_out, y_out
