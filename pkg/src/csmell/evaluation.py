"""Confusion matrices, per-class metrics, multiclass MCC, and the CV driver.

Conventions pinned here: 0/0 ratios evaluate to 0; multiclass MCC is the
Gorodkin generalization with a 0-on-degenerate-denominator rule; weighted
averages use class supports as weights.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import models as _models
from ._util import subseed
from .corpus import Dataset, DatasetError, LabelEncoding, encode_labels, stratified_split
from .features import feature_text, fit_vocabulary, tfidf_transform, tokenize
from .resample import smote


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    """K x K counts; rows are true classes, columns predicted classes."""

    labels: tuple
    counts: np.ndarray

    def __post_init__(self) -> None:
        k = len(self.labels)
        if self.counts.shape != (k, k):
            raise EvalError(f"counts shape {self.counts.shape} != ({k}, {k})")
        if (self.counts < 0).any():
            raise EvalError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def correct(self) -> int:
        return int(np.trace(self.counts))

    def to_rows(self) -> list[list[int]]:
        return self.counts.astype(int).tolist()


def confusion_matrix(y_true, y_pred, labels) -> ConfusionMatrix:
    y_true = list(y_true)
    y_pred = list(y_pred)
    if len(y_true) != len(y_pred):
        raise EvalError(f"length mismatch: {len(y_true)} true vs {len(y_pred)} predicted")
    if not y_true:
        raise EvalError("cannot build a confusion matrix from empty inputs")
    labels = tuple(labels)
    index = {lab: i for i, lab in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        if t not in index:
            raise EvalError(f"true value {t!r} not in labels")
        if p not in index:
            raise EvalError(f"predicted value {p!r} not in labels")
        counts[index[t], index[p]] += 1
    return ConfusionMatrix(labels=labels, counts=counts)


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class Averages:
    precision: float
    recall: float
    f1: float


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


@dataclass(frozen=True)
class EvalReport:
    labels: tuple
    per_class: dict
    accuracy: float
    macro_avg: Averages
    weighted_avg: Averages
    mcc: float
    confusion: ConfusionMatrix | None = None
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema": "csmell-report/1",
            "labels": [str(l) for l in self.labels],
            "per_class": {
                str(lab): {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for lab, m in self.per_class.items()
            },
            "accuracy": self.accuracy,
            "macro_avg": vars(self.macro_avg),
            "weighted_avg": vars(self.weighted_avg),
            "mcc": self.mcc,
            "confusion": self.confusion.to_rows() if self.confusion else None,
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, obj: dict) -> "EvalReport":
        if obj.get("schema") != "csmell-report/1":
            raise EvalError("not a csmell report (schema mismatch)")
        labels = tuple(obj["labels"])
        per_class = {
            lab: ClassMetrics(
                precision=m["precision"],
                recall=m["recall"],
                f1=m["f1"],
                support=m["support"],
            )
            for lab, m in obj["per_class"].items()
        }
        confusion = None
        if obj.get("confusion") is not None:
            confusion = ConfusionMatrix(
                labels=labels, counts=np.asarray(obj["confusion"], dtype=np.int64)
            )
        return cls(
            labels=labels,
            per_class=per_class,
            accuracy=obj["accuracy"],
            macro_avg=Averages(**obj["macro_avg"]),
            weighted_avg=Averages(**obj["weighted_avg"]),
            mcc=obj["mcc"],
            confusion=confusion,
            metadata=obj.get("metadata", {}),
        )

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        return cls.from_dict(json.loads(text))


def class_metrics(cm: ConfusionMatrix, average_labels=None) -> EvalReport:
    """Per-class P/R/F1 with macro and weighted averages and accuracy.

    average_labels restricts which classes enter the macro/weighted averages
    (used when a prediction-only sentinel column is present); per-class rows
    are still produced for every label in the matrix.
    """
    counts = cm.counts
    tp = np.diag(counts).astype(np.float64)
    pred_totals = counts.sum(axis=0).astype(np.float64)
    true_totals = counts.sum(axis=1).astype(np.float64)

    per_class: dict = {}
    for i, lab in enumerate(cm.labels):
        p = _safe_div(tp[i], pred_totals[i])
        r = _safe_div(tp[i], true_totals[i])
        f1 = _safe_div(2 * p * r, p + r)
        per_class[lab] = ClassMetrics(p, r, f1, int(true_totals[i]))

    if average_labels is None:
        average_labels = cm.labels
    avg_rows = [per_class[lab] for lab in average_labels]
    if not avg_rows:
        raise EvalError("no labels to average over")
    macro = Averages(
        precision=float(np.mean([m.precision for m in avg_rows])),
        recall=float(np.mean([m.recall for m in avg_rows])),
        f1=float(np.mean([m.f1 for m in avg_rows])),
    )
    support = float(sum(m.support for m in avg_rows))
    weighted = Averages(
        precision=_safe_div(sum(m.precision * m.support for m in avg_rows), support),
        recall=_safe_div(sum(m.recall * m.support for m in avg_rows), support),
        f1=_safe_div(sum(m.f1 * m.support for m in avg_rows), support),
    )
    accuracy = _safe_div(cm.correct, cm.total)
    return EvalReport(
        labels=cm.labels,
        per_class=per_class,
        accuracy=accuracy,
        macro_avg=macro,
        weighted_avg=weighted,
        mcc=mcc(cm),
        confusion=cm,
    )


def mcc(cm: ConfusionMatrix) -> float:
    """Multiclass Matthews correlation (Gorodkin); 0 on a degenerate denominator."""
    counts = cm.counts.astype(np.float64)
    s = counts.sum()
    c = np.trace(counts)
    t = counts.sum(axis=1)  # true counts per class
    p = counts.sum(axis=0)  # predicted counts per class
    num = c * s - float(t @ p)
    den_sq = (s * s - float(p @ p)) * (s * s - float(t @ t))
    if den_sq <= 0:
        return 0.0
    return float(num / np.sqrt(den_sq))


def evaluate(y_true, y_pred, labels, metadata=None, average_labels=None) -> EvalReport:
    cm = confusion_matrix(y_true, y_pred, labels)
    report = class_metrics(cm, average_labels=average_labels)
    if metadata:
        report.metadata.update(metadata)
    return report


# ---------------------------------------------------------------------------
# Cross-validation


def stratified_kfold(d: Dataset, k: int = 10, seed: int = 0) -> list[list[int]]:
    """k disjoint folds preserving per-class proportions (counts differ <= 1).

    Within each class, indices are shuffled by the seed and dealt round-robin
    to folds, so the assignment is deterministic.
    """
    if k < 2:
        raise EvalError("k must be >= 2")
    if k > len(d):
        raise EvalError(f"k={k} exceeds dataset size {len(d)}")
    d.require_labeled("stratified_kfold")

    by_class: dict[str, list[int]] = {}
    for i, r in enumerate(d.records):
        by_class.setdefault(r.label, []).append(i)  # type: ignore[arg-type]

    rng = np.random.default_rng(subseed(seed, "kfold"))
    folds: list[list[int]] = [[] for _ in range(k)]
    for c in sorted(by_class):
        idx = by_class[c]
        perm = rng.permutation(len(idx))
        for pos, p in enumerate(perm):
            folds[pos % k].append(idx[p])
    return [sorted(f) for f in folds]


def vectorize_split(
    train_records,
    eval_records,
    with_code: bool = False,
    keep_short_tokens: bool = False,
):
    """Fit vocabulary and label encoding on train only; transform both sides."""
    train_docs = [
        tokenize(feature_text(r, with_code), keep_short_tokens) for r in train_records
    ]
    eval_docs = [
        tokenize(feature_text(r, with_code), keep_short_tokens) for r in eval_records
    ]
    vocab = fit_vocabulary(train_docs)
    X_train = tfidf_transform(train_docs, vocab, [r.id for r in train_records])
    X_eval = tfidf_transform(eval_docs, vocab, [r.id for r in eval_records])
    encoding = encode_labels([r.label for r in train_records])
    y_train = encoding.encode_many([r.label for r in train_records])
    return X_train, X_eval, y_train, encoding, vocab


def _fit_and_score(
    spec: _models.ModelSpec,
    train_records,
    eval_records,
    smote_seed: int,
    model_seed: int,
    with_code: bool,
    keep_short_tokens: bool,
    smote_k: int,
) -> tuple[_models.TrainedModel, EvalReport]:
    """One pipeline pass: vectorize, SMOTE the train side only, train, score."""
    X_train, X_eval, y_train, encoding, vocab = vectorize_split(
        train_records, eval_records, with_code, keep_short_tokens
    )
    eval_labels = [r.label for r in eval_records]
    unseen = sorted(set(eval_labels) - set(encoding.labels))
    if unseen:
        raise EvalError(
            f"evaluation classes missing from training side: {unseen}; "
            "every class needs at least 2 records for a stratified protocol"
        )
    X_res, y_res = smote(X_train.matrix, y_train, k=smote_k, seed=smote_seed)
    model = _models.train(
        _models.ModelSpec(spec.kind, spec.hyperparams, seed=model_seed),
        X_res,
        y_res,
        encoding=encoding,
    )
    predicted = encoding.decode_many(_models.predict(model, X_eval.matrix))
    report = evaluate(
        eval_labels,
        predicted,
        encoding.labels,
        metadata={
            "model": spec.kind,
            "train_size": len(train_records),
            "eval_size": len(eval_records),
            "resampled_size": int(len(y_res)),
            "vocabulary_size": len(vocab),
            "stoplist_hash": vocab.stoplist_hash,
        },
    )
    return model, report


@dataclass(frozen=True)
class CvResult:
    kind: str
    k: int
    seed: int
    fold_reports: tuple[EvalReport, ...]
    mean_mcc: float
    mean_accuracy: float

    def to_dict(self) -> dict:
        return {
            "schema": "csmell-cv/1",
            "kind": self.kind,
            "k": self.k,
            "seed": self.seed,
            "mean_mcc": self.mean_mcc,
            "mean_accuracy": self.mean_accuracy,
            "folds": [r.to_dict() for r in self.fold_reports],
        }


def cross_validate(
    spec: _models.ModelSpec,
    d: Dataset,
    k: int = 10,
    seed: int = 0,
    with_code: bool = False,
    keep_short_tokens: bool = False,
    smote_k: int = 5,
) -> CvResult:
    """Stratified k-fold CV re-fitting the vectorizer and SMOTE inside every fold.

    Validation folds keep their natural class imbalance: SMOTE touches the
    training side only.
    """
    hist = d.histogram()
    thin = sorted(lab for lab, n in hist.items() if n < 2)
    if thin:
        raise EvalError(f"classes with fewer than 2 records cannot be cross-validated: {thin}")
    folds = stratified_kfold(d, k=k, seed=seed)
    all_indices = set(range(len(d)))
    reports: list[EvalReport] = []
    for i, fold in enumerate(folds):
        val_set = set(fold)
        train_records = [d.records[j] for j in sorted(all_indices - val_set)]
        val_records = [d.records[j] for j in fold]
        _, report = _fit_and_score(
            spec,
            train_records,
            val_records,
            smote_seed=subseed(seed, "fold", i, "smote"),
            model_seed=subseed(seed, "fold", i, "model", spec.kind),
            with_code=with_code,
            keep_short_tokens=keep_short_tokens,
            smote_k=smote_k,
        )
        report.metadata["fold"] = i
        reports.append(report)
    return CvResult(
        kind=spec.kind,
        k=k,
        seed=seed,
        fold_reports=tuple(reports),
        mean_mcc=float(np.mean([r.mcc for r in reports])),
        mean_accuracy=float(np.mean([r.accuracy for r in reports])),
    )


def train_test_protocol(
    spec: _models.ModelSpec,
    d: Dataset,
    test_fraction: float = 0.20,
    seed: int = 0,
    with_code: bool = False,
    keep_short_tokens: bool = False,
    smote_k: int = 5,
) -> tuple[_models.TrainedModel, EvalReport]:
    """The single 80:20 protocol: split, fit on train, evaluate on test."""
    train, test = stratified_split(d, test_fraction=test_fraction, seed=seed)
    model, report = _fit_and_score(
        spec,
        list(train.records),
        list(test.records),
        smote_seed=subseed(seed, "smote"),
        model_seed=subseed(seed, "model", spec.kind),
        with_code=with_code,
        keep_short_tokens=keep_short_tokens,
        smote_k=smote_k,
    )
    report.metadata["protocol"] = f"holdout-{test_fraction}"
    return model, report


# ---------------------------------------------------------------------------
# Rendering


def render_report(report: EvalReport, display=None) -> str:
    """Text table mirroring the per-class precision/recall/F1/support layout."""
    display = display or (lambda lab: str(lab))
    name_w = max([len(display(l)) for l in report.labels] + [len("Weighted Avg")])
    lines = [
        f"{'':<{name_w}}  Precision  Recall  F1-Score  Support",
    ]
    for lab in report.labels:
        m = report.per_class[lab]
        lines.append(
            f"{display(lab):<{name_w}}  {m.precision:9.2f}  {m.recall:6.2f}"
            f"  {m.f1:8.2f}  {m.support:7d}"
        )
    total = sum(report.per_class[l].support for l in report.labels)
    lines.append(f"{'Accuracy':<{name_w}}  {'':9}  {'':6}  {report.accuracy:8.2f}  {total:7d}")
    ma, wa = report.macro_avg, report.weighted_avg
    lines.append(
        f"{'Macro Avg':<{name_w}}  {ma.precision:9.2f}  {ma.recall:6.2f}  {ma.f1:8.2f}  {total:7d}"
    )
    lines.append(
        f"{'Weighted Avg':<{name_w}}  {wa.precision:9.2f}  {wa.recall:6.2f}  {wa.f1:8.2f}  {total:7d}"
    )
    lines.append(f"{'MCC':<{name_w}}  {report.mcc:9.2f}")
    return "\n".join(lines)


def confusion_csv(cm: ConfusionMatrix) -> str:
    header = "true\\pred," + ",".join(str(l) for l in cm.labels)
    rows = [header]
    for lab, row in zip(cm.labels, cm.counts):
        rows.append(str(lab) + "," + ",".join(str(int(v)) for v in row))
    return "\n".join(rows) + "\n"
