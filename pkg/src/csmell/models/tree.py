"""Single decision tree classifier (Gini, unpruned by default)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cart import Tree, grow_classification_tree


@dataclass
class DecisionTreeParams:
    tree: Tree
    n_classes: int

    def arrays(self) -> dict[str, np.ndarray]:
        return {f"tree/{k}": v for k, v in self.tree.arrays().items()}

    @classmethod
    def from_arrays(cls, arrays: dict[str, np.ndarray]) -> "DecisionTreeParams":
        tree = Tree.from_arrays({k.split("/", 1)[1]: v for k, v in arrays.items()})
        return cls(tree=tree, n_classes=tree.value.shape[1])


def fit(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    max_depth: int | None = None,
    min_samples_split: int = 2,
):
    tree = grow_classification_tree(
        X, y, n_classes, max_depth=max_depth, min_samples_split=min_samples_split
    )
    return DecisionTreeParams(tree, n_classes), {"n_nodes": tree.n_nodes}


def scores(params: DecisionTreeParams, X: np.ndarray) -> np.ndarray:
    """Leaf class fractions: uncalibrated vote shares, not probabilities."""
    counts = params.tree.predict_value(X)
    totals = counts.sum(axis=1, keepdims=True)
    return counts / np.maximum(totals, 1e-300)
