"""Tokenization and TF-IDF vectorization of comment text.

Weighting is tf * idf with the smoothed idf ``ln((1+N)/(1+df)) + 1`` followed
by L2 row normalization. The stop-word list is a fixed file of 318 common
English words shipped with the package; its hash is recorded in every fitted
vocabulary so runs are reproducible.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .corpus import CommentRecord
from . import labels as _labels

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def _load_stopwords() -> tuple[frozenset[str], str]:
    data = resources.files("csmell.data").joinpath("stopwords.txt").read_bytes()
    words = frozenset(w for w in data.decode("utf-8").split() if w)
    return words, hashlib.sha256(data).hexdigest()


STOPWORDS, STOPLIST_HASH = _load_stopwords()


def tokenize(text: str, keep_short_tokens: bool = False) -> list[str]:
    """Lowercase unigram tokens: split on non-alphanumerics, drop stop words.

    Single-character tokens are dropped by default (one-letter identifiers in
    code comments are noise); pass keep_short_tokens=True to retain them.
    """
    tokens = _TOKEN_RE.findall(text.lower())
    out = []
    for tok in tokens:
        if tok in STOPWORDS:
            continue
        if len(tok) == 1 and not keep_short_tokens:
            continue
        out.append(tok)
    return out


def feature_text(record: CommentRecord, with_code: bool = False) -> str:
    """Text fed to the vectorizer: the comment, optionally plus its code."""
    if with_code and record.code_segment != _labels.NA_CODE:
        return record.comment_text + "\n" + record.code_segment
    return record.comment_text


@dataclass(frozen=True)
class Vocabulary:
    """Term -> column map with document frequencies, fit on training docs only."""

    terms: tuple[str, ...]
    doc_freq: tuple[int, ...]
    n_docs: int
    stoplist_hash: str = STOPLIST_HASH
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if tuple(sorted(self.terms)) != self.terms:
            raise ValueError("vocabulary terms must be lexicographically sorted")
        if len(self.terms) != len(self.doc_freq):
            raise ValueError("terms and doc_freq lengths differ")
        for t, df in zip(self.terms, self.doc_freq):
            if not (1 <= df <= self.n_docs):
                raise ValueError(f"term {t!r}: df {df} outside 1..{self.n_docs}")
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.terms)})

    def __len__(self) -> int:
        return len(self.terms)

    def index(self, term: str) -> int | None:
        return self._index.get(term)

    def idf(self) -> np.ndarray:
        df = np.asarray(self.doc_freq, dtype=np.float64)
        return np.log((1.0 + self.n_docs) / (1.0 + df)) + 1.0

    def to_json(self) -> str:
        return json.dumps(
            {
                "format": "csmell-vocabulary",
                "version": 1,
                "n_docs": self.n_docs,
                "stoplist_hash": self.stoplist_hash,
                "terms": list(self.terms),
                "doc_freq": list(self.doc_freq),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Vocabulary":
        obj = json.loads(text)
        if obj.get("format") != "csmell-vocabulary":
            raise ValueError("not a vocabulary file")
        return cls(
            terms=tuple(obj["terms"]),
            doc_freq=tuple(obj["doc_freq"]),
            n_docs=obj["n_docs"],
            stoplist_hash=obj["stoplist_hash"],
        )


def fit_vocabulary(docs: list[list[str]]) -> Vocabulary:
    """Fit term indices and document frequencies on training documents."""
    if not docs:
        raise ValueError("cannot fit a vocabulary on an empty corpus")
    df: Counter[str] = Counter()
    for doc in docs:
        df.update(set(doc))
    terms = tuple(sorted(df))
    return Vocabulary(terms=terms, doc_freq=tuple(df[t] for t in terms), n_docs=len(docs))


@dataclass(frozen=True)
class FeatureMatrix:
    """Sparse document-term matrix; rows align with record ids."""

    matrix: sp.csr_matrix
    row_ids: tuple[str, ...]
    vocabulary: Vocabulary

    def __post_init__(self) -> None:
        if self.matrix.shape[0] != len(self.row_ids):
            raise ValueError("row_ids length does not match matrix rows")
        if self.matrix.shape[1] != len(self.vocabulary):
            raise ValueError("matrix width does not match vocabulary size")

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def tfidf_transform(
    docs: list[list[str]],
    vocabulary: Vocabulary,
    row_ids: list[str] | None = None,
) -> FeatureMatrix:
    """Weight docs by tf * idf and L2-normalize each row.

    Out-of-vocabulary tokens are ignored; a document with no in-vocabulary
    token becomes an all-zero row.
    """
    if row_ids is None:
        row_ids = [str(i) for i in range(len(docs))]
    if len(row_ids) != len(docs):
        raise ValueError("row_ids length does not match docs")
    idf = vocabulary.idf()
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for doc in docs:
        counts: Counter[int] = Counter()
        for tok in doc:
            col = vocabulary.index(tok)
            if col is not None:
                counts[col] += 1
        cols = sorted(counts)
        weights = np.array([counts[c] * idf[c] for c in cols], dtype=np.float64)
        norm = math.sqrt(float(np.sum(weights * weights)))
        if norm > 0:
            weights /= norm
        indices.extend(cols)
        data.extend(weights.tolist())
        indptr.append(len(indices))
    matrix = sp.csr_matrix(
        (np.asarray(data), np.asarray(indices, dtype=np.int32), np.asarray(indptr, dtype=np.int32)),
        shape=(len(docs), len(vocabulary)),
    )
    return FeatureMatrix(matrix=matrix, row_ids=tuple(row_ids), vocabulary=vocabulary)


# ---------------------------------------------------------------------------
# Sparse triplet persistence: a JSON header line, then one "row col value"
# line per stored entry.


def save_matrix(fm: FeatureMatrix, path: str | Path) -> None:
    coo = fm.matrix.tocoo()
    header = {
        "format": "csmell-sparse-triplets",
        "version": 1,
        "rows": int(coo.shape[0]),
        "cols": int(coo.shape[1]),
        "nnz": int(coo.nnz),
        "row_ids": list(fm.row_ids),
    }
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(header) + "\n")
        for r, c, v in zip(coo.row, coo.col, coo.data):
            f.write(f"{int(r)} {int(c)} {v!r}\n")


def load_matrix(path: str | Path, vocabulary: Vocabulary) -> FeatureMatrix:
    with open(path, encoding="utf-8") as f:
        header = json.loads(f.readline())
        if header.get("format") != "csmell-sparse-triplets":
            raise ValueError("not a sparse triplet file")
        rows, cols, vals = [], [], []
        for line in f:
            if not line.strip():
                continue
            r, c, v = line.split()
            rows.append(int(r))
            cols.append(int(c))
            vals.append(float(v))
    matrix = sp.csr_matrix(
        (vals, (rows, cols)), shape=(header["rows"], header["cols"])
    )
    return FeatureMatrix(
        matrix=matrix, row_ids=tuple(header["row_ids"]), vocabulary=vocabulary
    )
