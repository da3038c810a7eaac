"""Random forest: bagged Gini trees with per-split feature subsampling.

Each tree draws its own RNG substream from the model seed, so runs with a
fixed seed grow bit-identical forests regardless of execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .._util import subseed
from .base import ModelError
from .cart import Tree, grow_tree, prepare_split_data


@dataclass
class ForestParams:
    trees: list[Tree]
    n_classes: int

    def arrays(self) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {}
        for i, tree in enumerate(self.trees):
            for k, v in tree.arrays().items():
                out[f"tree{i}/{k}"] = v
        return out

    @classmethod
    def from_arrays(cls, arrays: dict[str, np.ndarray]) -> "ForestParams":
        groups: dict[int, dict[str, np.ndarray]] = {}
        for key, v in arrays.items():
            prefix, name = key.split("/", 1)
            groups.setdefault(int(prefix[4:]), {})[name] = v
        trees = [Tree.from_arrays(groups[i]) for i in sorted(groups)]
        return cls(trees=trees, n_classes=trees[0].value.shape[1])


def _resolve_max_features(max_features, n_features: int) -> int | None:
    if max_features is None:
        return None
    if max_features == "sqrt":
        return max(1, int(math.isqrt(n_features)))
    if isinstance(max_features, int) and max_features >= 1:
        return min(max_features, n_features)
    raise ModelError(f"invalid max_features {max_features!r}")


def fit(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    seed: int,
    n_trees: int = 100,
    bootstrap: bool = True,
    max_features="sqrt",
    max_depth: int | None = None,
    min_samples_split: int = 2,
):
    n = X.shape[0]
    sd = prepare_split_data(X)
    m = _resolve_max_features(max_features, X.shape[1])
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), y] = 1.0

    trees: list[Tree] = []
    for t in range(n_trees):
        rng = np.random.default_rng(subseed(seed, "tree", t))
        if bootstrap:
            draws = rng.integers(0, n, size=n)
            weights = np.bincount(draws, minlength=n).astype(np.float64)
        else:
            weights = np.ones(n)
        trees.append(
            grow_tree(
                X,
                sd,
                weights,
                stat_rows=onehot,
                value_rows=onehot,
                max_depth=max_depth,
                min_samples_split=min_samples_split,
                max_features=m,
                rng=rng,
            )
        )
    return ForestParams(trees, n_classes), {"n_trees": n_trees}


def scores(params: ForestParams, X: np.ndarray) -> np.ndarray:
    """Fraction of trees voting for each class (exact vote shares)."""
    votes = np.zeros((X.shape[0], params.n_classes))
    for tree in params.trees:
        counts = tree.predict_value(X)
        # Each tree votes for its leaf's majority class, lowest class on ties.
        votes[np.arange(X.shape[0]), np.argmax(counts, axis=1)] += 1.0
    return votes / len(params.trees)
