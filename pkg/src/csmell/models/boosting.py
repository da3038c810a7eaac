"""Gradient boosting: one-vs-rest additive model on binomial log-loss.

Each class head starts at its prior log-odds and adds shallow squared-error
regression trees fit to the residuals, with Newton leaf values
sum(residual) / sum(p * (1 - p)). With a zero learning rate the model stays
at its prior, predicting the training majority class everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cart import Tree, grow_regression_tree, prepare_split_data


@dataclass
class BoostingParams:
    base_scores: np.ndarray  # (K,) prior log-odds
    trees: list[list[Tree]]  # [class][round]
    learning_rate: float

    def arrays(self) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {"base_scores": self.base_scores}
        for k, head in enumerate(self.trees):
            for r, tree in enumerate(head):
                for name, v in tree.arrays().items():
                    out[f"head{k}/round{r}/{name}"] = v
        return out

    @classmethod
    def from_arrays(cls, arrays: dict[str, np.ndarray], learning_rate: float) -> "BoostingParams":
        base = arrays["base_scores"]
        grouped: dict[tuple[int, int], dict[str, np.ndarray]] = {}
        for key, v in arrays.items():
            if key == "base_scores":
                continue
            head, rnd, name = key.split("/", 2)
            grouped.setdefault((int(head[4:]), int(rnd[5:])), {})[name] = v
        n_heads = 1 + max(k for k, _ in grouped) if grouped else len(base)
        trees: list[list[Tree]] = [[] for _ in range(n_heads)]
        for (k, r) in sorted(grouped):
            trees[k].append(Tree.from_arrays(grouped[(k, r)]))
        return cls(base_scores=base, trees=trees, learning_rate=learning_rate)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def fit(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    n_rounds: int = 100,
    learning_rate: float = 0.1,
    max_depth: int = 3,
):
    n = X.shape[0]
    sd = prepare_split_data(X)
    priors = np.clip(np.bincount(y, minlength=n_classes) / n, 1e-12, 1 - 1e-12)
    base_scores = np.log(priors / (1.0 - priors))

    trees: list[list[Tree]] = []
    for k in range(n_classes):
        target = (y == k).astype(np.float64)
        f = np.full(n, base_scores[k])
        head: list[Tree] = []
        for _ in range(n_rounds):
            p = _sigmoid(f)
            residual = target - p
            tree = grow_regression_tree(X, residual, sd=sd, max_depth=max_depth)
            # Newton step per leaf: sum(residual) / sum(hessian).
            leaf_of = tree.apply(X)
            hess = p * (1.0 - p)
            n_nodes = tree.n_nodes
            num = np.bincount(leaf_of, weights=residual, minlength=n_nodes)
            den = np.bincount(leaf_of, weights=hess, minlength=n_nodes)
            leaf_value = num / np.maximum(den, 1e-12)
            tree.value = leaf_value[:, None]
            head.append(tree)
            f = f + learning_rate * tree.predict_value(X)[:, 0]
        trees.append(head)
    params = BoostingParams(base_scores=base_scores, trees=trees, learning_rate=learning_rate)
    return params, {"n_rounds": n_rounds}


def scores(params: BoostingParams, X: np.ndarray) -> np.ndarray:
    out = np.tile(params.base_scores, (X.shape[0], 1))
    for k, head in enumerate(params.trees):
        for tree in head:
            out[:, k] += params.learning_rate * tree.predict_value(X)[:, 0]
    return out


def proba(params: BoostingParams, X: np.ndarray) -> np.ndarray:
    """Per-head sigmoids normalized to sum to one (order-preserving)."""
    s = _sigmoid(scores(params, X))
    return s / s.sum(axis=1, keepdims=True)
