"""Shared CART machinery for the tree, forest and boosting models.

Split search runs over a per-feature value-sorted entry table prepared once
per training matrix. For nonnegative matrices (the TF-IDF case) only nonzero
entries are stored and the zero rows of each column form an implicit minimum
block, which keeps split search proportional to the number of nonzeros
instead of n * V. Matrices with negative values fall back to storing every
value; both paths share the same scoring code and produce exact best-split
CART with deterministic tie-breaking (lowest feature index, then lowest
threshold).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SplitData:
    """Per-feature entries sorted ascending by value within each column."""

    n_rows: int
    n_features: int
    col_ids: np.ndarray  # (nnz,) int32, column-major blocks
    row_ids: np.ndarray  # (nnz,) int32
    values: np.ndarray  # (nnz,) float64
    implicit_zeros: bool  # True when omitted entries are an implicit zero block


def prepare_split_data(X: np.ndarray) -> SplitData:
    X = np.asarray(X, dtype=np.float64)
    n, v = X.shape
    sparse_mode = not (X < 0).any()
    col_ids: list[np.ndarray] = []
    row_ids: list[np.ndarray] = []
    values: list[np.ndarray] = []
    for f in range(v):
        col = X[:, f]
        rows = np.flatnonzero(col) if sparse_mode else np.arange(n, dtype=np.int64)
        if rows.size == 0:
            continue
        vals = col[rows]
        order = np.argsort(vals, kind="stable")
        col_ids.append(np.full(rows.size, f, dtype=np.int32))
        row_ids.append(rows[order].astype(np.int32))
        values.append(vals[order])
    if col_ids:
        return SplitData(
            n_rows=n,
            n_features=v,
            col_ids=np.concatenate(col_ids),
            row_ids=np.concatenate(row_ids),
            values=np.concatenate(values),
            implicit_zeros=sparse_mode,
        )
    return SplitData(
        n_rows=n,
        n_features=v,
        col_ids=np.empty(0, dtype=np.int32),
        row_ids=np.empty(0, dtype=np.int32),
        values=np.empty(0, dtype=np.float64),
        implicit_zeros=sparse_mode,
    )


def _segment_prefix(x: np.ndarray, seg_id: np.ndarray, seg_first: np.ndarray) -> np.ndarray:
    """Inclusive cumulative sum of x restarted at every segment boundary."""
    cs = np.cumsum(x)
    base = cs[seg_first] - x[seg_first]
    return cs - base[seg_id]


def _find_best_split(
    sd: SplitData,
    node_mask: np.ndarray,
    weights: np.ndarray,
    stat_rows: np.ndarray,
    node_total_w: float,
    node_total_stats: np.ndarray,
    feature_mask: np.ndarray | None,
):
    """Best (score, feature, threshold) for one node, or None.

    stat_rows is an (n, S) per-row statistics matrix; the split score is
    sum over sides of (sum_s stats_s^2) / side_weight, maximized. For Gini
    the statistics are weighted one-hot class indicators; for squared error
    a single weighted target column. node_total_stats is its node-level sum.
    """
    sel = node_mask[sd.row_ids]
    if feature_mask is not None:
        sel &= feature_mask[sd.col_ids]
    pos = np.flatnonzero(sel)
    if pos.size == 0:
        return None
    cols = sd.col_ids[pos]
    vals = sd.values[pos]
    rows = sd.row_ids[pos]

    seg_start = np.empty(pos.size, dtype=bool)
    seg_start[0] = True
    np.not_equal(cols[1:], cols[:-1], out=seg_start[1:])
    seg_id = np.cumsum(seg_start) - 1
    seg_first = np.flatnonzero(seg_start)

    w_entry = weights[rows]
    stats_entry = stat_rows[rows] * w_entry[:, None]
    prefix_w = _segment_prefix(w_entry, seg_id, seg_first)
    prefix_stats = np.column_stack(
        [_segment_prefix(stats_entry[:, s], seg_id, seg_first) for s in range(stats_entry.shape[1])]
    )

    seg_last = np.append(seg_first[1:] - 1, pos.size - 1)
    seg_total_w = prefix_w[seg_last]
    seg_total_stats = prefix_stats[seg_last]

    best: tuple[float, int, float] | None = None

    # Boundaries between consecutive distinct values within a column. The
    # left side additionally contains the column's implicit zero block.
    boundary = np.empty(pos.size, dtype=bool)
    boundary[-1] = False
    np.logical_and(~seg_start[1:], vals[1:] > vals[:-1], out=boundary[:-1])
    cand = np.flatnonzero(boundary)
    if cand.size:
        zero_w = (node_total_w - seg_total_w[seg_id[cand]]) if sd.implicit_zeros else 0.0
        zero_stats = (
            node_total_stats[None, :] - seg_total_stats[seg_id[cand]]
            if sd.implicit_zeros
            else np.zeros_like(seg_total_stats[seg_id[cand]])
        )
        left_w = zero_w + prefix_w[cand]
        left_stats = zero_stats + prefix_stats[cand]
        right_w = node_total_w - left_w
        right_stats = node_total_stats[None, :] - left_stats
        ok = (left_w > 0) & (right_w > 0)
        if ok.any():
            score = np.where(
                ok,
                np.sum(left_stats * left_stats, axis=1) / np.maximum(left_w, 1e-300)
                + np.sum(right_stats * right_stats, axis=1) / np.maximum(right_w, 1e-300),
                -np.inf,
            )
            i = int(np.argmax(score))
            c = cand[i]
            best = (float(score[i]), int(cols[c]), float((vals[c] + vals[c + 1]) / 2.0))

    if sd.implicit_zeros:
        # Boundary between a column's zero block and its smallest nonzero.
        zc_w = node_total_w - seg_total_w
        ok = zc_w > 0
        if ok.any():
            zero_stats = node_total_stats[None, :] - seg_total_stats
            score = np.where(
                ok,
                np.sum(zero_stats * zero_stats, axis=1) / np.maximum(zc_w, 1e-300)
                + np.sum(seg_total_stats * seg_total_stats, axis=1)
                / np.maximum(seg_total_w, 1e-300),
                -np.inf,
            )
            i = int(np.argmax(score))
            if np.isfinite(score[i]):
                cand_col = int(cols[seg_first[i]])
                cand_thr = float(vals[seg_first[i]] / 2.0)
                cand_score = float(score[i])
                if (
                    best is None
                    or cand_score > best[0]
                    or (
                        cand_score == best[0]
                        and (cand_col, cand_thr) < (best[1], best[2])
                    )
                ):
                    best = (cand_score, cand_col, cand_thr)
    return best


@dataclass
class Tree:
    """Flat array tree; feature == -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # (n_nodes, value_dim)

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def apply(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            feat = self.feature[node]
            active = feat >= 0
            if not active.any():
                return node
            rows = np.flatnonzero(active)
            f = feat[rows]
            go_left = X[rows, f] <= self.threshold[node[rows]]
            node[rows] = np.where(
                go_left, self.left[node[rows]], self.right[node[rows]]
            )

    def predict_value(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def arrays(self) -> dict[str, np.ndarray]:
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "value": self.value,
        }

    @classmethod
    def from_arrays(cls, arrays: dict[str, np.ndarray]) -> "Tree":
        return cls(
            feature=arrays["feature"].astype(np.int32),
            threshold=arrays["threshold"].astype(np.float64),
            left=arrays["left"].astype(np.int32),
            right=arrays["right"].astype(np.int32),
            value=arrays["value"].astype(np.float64),
        )


def grow_tree(
    X: np.ndarray,
    sd: SplitData,
    weights: np.ndarray,
    stat_rows: np.ndarray,
    value_rows: np.ndarray,
    max_depth: int | None,
    min_samples_split: int,
    max_features: int | None,
    rng: np.random.Generator | None,
) -> Tree:
    """Grow a CART tree depth-first (left before right), deterministically.

    weights are per-row multiplicities (0 excludes a row, e.g. out-of-bag);
    stat_rows drives split scoring; value_rows (per-row, weighted at leaves)
    accumulates into node values (class counts, or target sums for
    regression).
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    weights = np.asarray(weights, dtype=np.float64)
    value_dim = value_rows.shape[1]

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[np.ndarray] = []

    root_rows = np.flatnonzero(weights > 0).astype(np.int64)

    def new_node(node_value: np.ndarray) -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(node_value)
        return len(feature) - 1

    # (node_id, rows, depth); children pushed right-then-left for preorder.
    stack: list[tuple[int, np.ndarray, int]] = []

    def node_summary(rows: np.ndarray):
        w = weights[rows]
        total_w = float(w.sum())
        total_stats = (stat_rows[rows] * w[:, None]).sum(axis=0)
        node_value = (value_rows[rows] * w[:, None]).sum(axis=0)
        return total_w, total_stats, node_value

    tw, ts, tv = node_summary(root_rows)
    root = new_node(tv)
    stack.append((root, root_rows, 0))

    while stack:
        node_id, rows, depth = stack.pop()
        total_w, total_stats, _ = node_summary(rows)

        if total_w < min_samples_split:
            continue
        if max_depth is not None and depth >= max_depth:
            continue
        # Pure node: all scoring mass in one statistic equals zero impurity.
        if float(np.sum(total_stats * total_stats)) / total_w >= total_w - 1e-9:
            if stat_rows.shape[1] > 1:  # classification purity
                continue
        if stat_rows.shape[1] == 1:
            sumsq = float(np.sum(weights[rows] * stat_rows[rows, 0] ** 2))
            if sumsq - total_stats[0] ** 2 / total_w <= 1e-12:
                continue

        feature_mask = None
        if max_features is not None and max_features < sd.n_features:
            assert rng is not None, "feature subsampling requires an RNG"
            chosen = rng.choice(sd.n_features, size=max_features, replace=False)
            feature_mask = np.zeros(sd.n_features, dtype=bool)
            feature_mask[chosen] = True

        node_mask = np.zeros(n, dtype=bool)
        node_mask[rows] = True
        found = _find_best_split(
            sd, node_mask, weights, stat_rows, total_w, total_stats, feature_mask
        )
        if found is None:
            continue
        _, f, thr = found

        go_left = X[rows, f] <= thr
        rows_l = rows[go_left]
        rows_r = rows[~go_left]
        if rows_l.size == 0 or rows_r.size == 0:
            continue

        _, _, val_l = node_summary(rows_l)
        _, _, val_r = node_summary(rows_r)
        feature[node_id] = f
        threshold[node_id] = thr
        left_id = new_node(val_l)
        right_id = new_node(val_r)
        left[node_id] = left_id
        right[node_id] = right_id
        stack.append((right_id, rows_r, depth + 1))
        stack.append((left_id, rows_l, depth + 1))

    return Tree(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        value=np.asarray(value, dtype=np.float64).reshape(len(feature), value_dim),
    )


def grow_classification_tree(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    sd: SplitData | None = None,
    weights: np.ndarray | None = None,
    max_depth: int | None = None,
    min_samples_split: int = 2,
    max_features: int | None = None,
    rng: np.random.Generator | None = None,
) -> Tree:
    """Gini-impurity CART; leaf values are weighted class counts."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if sd is None:
        sd = prepare_split_data(X)
    if weights is None:
        weights = np.ones(X.shape[0], dtype=np.float64)
    onehot = np.zeros((X.shape[0], n_classes), dtype=np.float64)
    onehot[np.arange(X.shape[0]), y] = 1.0
    return grow_tree(
        X,
        sd,
        weights,
        stat_rows=onehot,
        value_rows=onehot,
        max_depth=max_depth,
        min_samples_split=min_samples_split,
        max_features=max_features,
        rng=rng,
    )


def grow_regression_tree(
    X: np.ndarray,
    targets: np.ndarray,
    sd: SplitData | None = None,
    max_depth: int | None = None,
    min_samples_split: int = 2,
) -> Tree:
    """Squared-error CART; leaf values are [sum(target), count]."""
    X = np.asarray(X, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if sd is None:
        sd = prepare_split_data(X)
    weights = np.ones(X.shape[0], dtype=np.float64)
    value_rows = np.column_stack([targets, np.ones_like(targets)])
    return grow_tree(
        X,
        sd,
        weights,
        stat_rows=targets[:, None],
        value_rows=value_rows,
        max_depth=max_depth,
        min_samples_split=min_samples_split,
        max_features=None,
        rng=None,
    )
