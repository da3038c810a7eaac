"""Bundled synthetic corpora for sanity checks and benchmarks.

The separable corpus gives each class its own disjoint keyword vocabulary,
so any reasonable text classifier should reach near-perfect accuracy on it.
"""

from __future__ import annotations

import numpy as np

from ._util import subseed
from .corpus import CommentRecord, Dataset

_CLASS_LABELS = ("beautification", "obvious", "task", "vague", "misleading", "irrelevant")
_PREFIXES = ("alder", "birch", "cedar", "dogwood", "elm", "fir")


def make_separable_corpus(
    n_classes: int = 4,
    docs_per_class: int = 50,
    vocab_per_class: int = 6,
    seed: int = 7,
) -> Dataset:
    """Dataset of synthetic comments with disjoint per-class keyword sets."""
    if not (2 <= n_classes <= len(_CLASS_LABELS)):
        raise ValueError(f"n_classes must be in 2..{len(_CLASS_LABELS)}")
    rng = np.random.default_rng(subseed(seed, "separable-corpus"))
    vocabs = [
        [f"{_PREFIXES[c]}{i:02d}" for i in range(vocab_per_class)]
        for c in range(n_classes)
    ]
    records = []
    rid = 0
    for c in range(n_classes):
        for _ in range(docs_per_class):
            length = int(rng.integers(6, 13))
            words = [vocabs[c][int(rng.integers(0, vocab_per_class))] for _ in range(length)]
            records.append(
                CommentRecord(
                    id=str(rid),
                    project="synthetic",
                    language="java",
                    file_path="synthetic.java",
                    line_start=rid + 1,
                    line_end=rid + 1,
                    comment_text=" ".join(words),
                    label=_CLASS_LABELS[c],
                )
            )
            rid += 1
    return Dataset(tuple(records))
