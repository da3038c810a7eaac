"""Dataset model: loading, deduplication, filtering, encoding, splitting.

The interchange format is UTF-8 CSV with header
``id,project,language,file_path,line_start,line_end,comment,code,label``
plus a JSONL mirror using the same field names. All operations are pure
functions over immutable records.
"""

from __future__ import annotations

import csv
import datetime as _dt
import json
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import labels as _labels
from ._util import subseed

CSV_HEADER = (
    "id",
    "project",
    "language",
    "file_path",
    "line_start",
    "line_end",
    "comment",
    "code",
    "label",
)

LANGUAGES = ("java", "python")


class DatasetError(ValueError):
    """Raised for malformed dataset files or contract violations."""


@dataclass(frozen=True)
class CommentRecord:
    """One inline comment with provenance, optional code segment and label."""

    id: str
    project: str = ""
    language: str = "java"
    file_path: str = ""
    line_start: int = 1
    line_end: int = 1
    comment_text: str = ""
    code_segment: str = _labels.NA_CODE
    label: str | None = None

    def __post_init__(self) -> None:
        if not self.comment_text.strip():
            raise DatasetError(f"record {self.id!r}: empty comment text")
        if self.language not in LANGUAGES:
            raise DatasetError(f"record {self.id!r}: unknown language {self.language!r}")
        if not (1 <= self.line_start <= self.line_end):
            raise DatasetError(
                f"record {self.id!r}: invalid line span "
                f"{self.line_start}..{self.line_end}"
            )
        if self.code_segment != _labels.NA_CODE and not self.code_segment:
            raise DatasetError(f"record {self.id!r}: code segment must be 'NA' or non-empty")
        if self.label is not None and not _labels.is_canonical(self.label):
            raise DatasetError(f"record {self.id!r}: non-canonical label {self.label!r}")


@dataclass(frozen=True)
class Provenance:
    source: str
    format: str
    loaded_at: str


@dataclass(frozen=True)
class Dataset:
    records: tuple[CommentRecord, ...]
    provenance: Provenance | None = None

    def __post_init__(self) -> None:
        ids = [r.id for r in self.records]
        if len(set(ids)) != len(ids):
            dupes = sorted(i for i, n in Counter(ids).items() if n > 1)
            raise DatasetError(f"duplicate record ids: {dupes[:5]}")

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def histogram(self) -> dict[str, int]:
        """Per-label record counts (unlabeled records under key None excluded)."""
        return dict(Counter(r.label for r in self.records if r.label is not None))

    def labels(self) -> list[str | None]:
        return [r.label for r in self.records]

    def require_labeled(self, op: str) -> None:
        missing = [r.id for r in self.records if r.label is None]
        if missing:
            raise DatasetError(f"{op} requires labeled records; unlabeled: {missing[:5]}")

    def subset(self, indices) -> "Dataset":
        return Dataset(tuple(self.records[i] for i in indices), self.provenance)


@dataclass(frozen=True)
class LabelEncoding:
    """Bijective label <-> integer map fit on training labels only.

    Integers 0..K-1 follow the lexicographic order of the canonical strings.
    """

    labels: tuple[str, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if tuple(sorted(self.labels)) != self.labels:
            raise DatasetError("encoding labels must be lexicographically sorted")
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})

    def __len__(self) -> int:
        return len(self.labels)

    def encode(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise DatasetError(
                f"label {label!r} not present in the training labels {self.labels}"
            ) from None

    def decode(self, code: int) -> str:
        return self.labels[code]

    def encode_many(self, labs) -> np.ndarray:
        return np.array([self.encode(l) for l in labs], dtype=np.int64)

    def decode_many(self, codes) -> list[str]:
        return [self.labels[int(c)] for c in codes]


# ---------------------------------------------------------------------------
# Loading and saving


def _record_from_row(row: dict, row_no: int, problems: list[str]) -> CommentRecord | None:
    raw_label = (row.get("label") or "").strip()
    label = None
    if raw_label:
        label = _labels.canonicalize(raw_label)
        if label is None:
            problems.append(f"row {row_no}: unknown label {raw_label!r}")
            return None
    comment = (row.get("comment") or "").strip()
    if not comment:
        problems.append(f"row {row_no}: missing comment text")
        return None
    code = (row.get("code") or "").strip() or _labels.NA_CODE
    try:
        return CommentRecord(
            id=(row.get("id") or "").strip() or str(row_no),
            project=(row.get("project") or "").strip(),
            language=(row.get("language") or "java").strip().lower(),
            file_path=(row.get("file_path") or "").strip(),
            line_start=int(row.get("line_start") or 1),
            line_end=int(row.get("line_end") or 1),
            comment_text=comment,
            code_segment=code,
            label=label,
        )
    except (DatasetError, ValueError) as exc:
        problems.append(f"row {row_no}: {exc}")
        return None


def load_dataset(path: str | Path, format: str | None = None) -> Dataset:
    """Load a dataset from CSV or JSONL; format inferred from suffix if omitted.

    Row ids default to the 1-based data row index. Any unknown label alias or
    malformed row aborts the load with an error listing the offending rows.
    """
    path = Path(path)
    if format is None:
        format = "jsonl" if path.suffix.lower() in (".jsonl", ".ndjson") else "csv"
    if format not in ("csv", "jsonl"):
        raise DatasetError(f"unsupported dataset format {format!r}")
    if not path.exists():
        raise DatasetError(f"dataset file not found: {path}")

    problems: list[str] = []
    records: list[CommentRecord] = []
    if format == "csv":
        with open(path, newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames is None or "comment" not in reader.fieldnames:
                raise DatasetError(f"{path}: missing CSV header with a 'comment' column")
            for row_no, row in enumerate(reader, start=1):
                rec = _record_from_row(row, row_no, problems)
                if rec is not None:
                    records.append(rec)
    else:
        with open(path, encoding="utf-8") as f:
            for row_no, line in enumerate((l for l in f if l.strip()), start=1):
                try:
                    row = json.loads(line)
                except json.JSONDecodeError as exc:
                    problems.append(f"row {row_no}: invalid JSON ({exc.msg})")
                    continue
                rec = _record_from_row(row, row_no, problems)
                if rec is not None:
                    records.append(rec)

    if problems:
        raise DatasetError(f"{path}: {len(problems)} bad row(s):\n  " + "\n  ".join(problems))
    provenance = Provenance(
        source=str(path),
        format=format,
        loaded_at=_dt.datetime.now(_dt.timezone.utc).isoformat(),
    )
    return Dataset(tuple(records), provenance)


def _row_dict(r: CommentRecord) -> dict:
    return {
        "id": r.id,
        "project": r.project,
        "language": r.language,
        "file_path": r.file_path,
        "line_start": r.line_start,
        "line_end": r.line_end,
        "comment": r.comment_text,
        "code": r.code_segment,
        "label": r.label or "",
    }


def save_dataset(d: Dataset, path: str | Path, format: str | None = None) -> None:
    path = Path(path)
    if format is None:
        format = "jsonl" if path.suffix.lower() in (".jsonl", ".ndjson") else "csv"
    if format == "csv":
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=CSV_HEADER)
            writer.writeheader()
            for r in d.records:
                writer.writerow(_row_dict(r))
    elif format == "jsonl":
        with open(path, "w", encoding="utf-8") as f:
            for r in d.records:
                f.write(json.dumps(_row_dict(r), ensure_ascii=False) + "\n")
    else:
        raise DatasetError(f"unsupported dataset format {format!r}")


# ---------------------------------------------------------------------------
# Dataset transforms


@dataclass(frozen=True)
class DedupReport:
    before: int
    after: int
    removed: int


def dedup(d: Dataset) -> tuple[Dataset, DedupReport]:
    """Drop records whose exact (comment_text, label) pair was already seen.

    Keeps the first occurrence and preserves relative order. The key is exact
    string equality with no whitespace normalization, so reruns are stable.
    """
    d.require_labeled("dedup")
    seen: set[tuple[str, str]] = set()
    kept: list[CommentRecord] = []
    for r in d.records:
        key = (r.comment_text, r.label)  # type: ignore[arg-type]
        if key in seen:
            continue
        seen.add(key)
        kept.append(r)
    report = DedupReport(before=len(d), after=len(kept), removed=len(d) - len(kept))
    return Dataset(tuple(kept), d.provenance), report


@dataclass(frozen=True)
class ClassFilterEntry:
    label: str
    count: int
    kept: bool


@dataclass(frozen=True)
class ClassFilterReport:
    threshold: int
    entries: tuple[ClassFilterEntry, ...]
    before: int
    after: int


def remove_minority_classes(
    d: Dataset, threshold: int = 30
) -> tuple[Dataset, ClassFilterReport]:
    """Drop every record whose class has fewer than ``threshold`` instances."""
    d.require_labeled("remove_minority_classes")
    hist = d.histogram()
    keep = {lab for lab, n in hist.items() if n >= threshold}
    entries = tuple(
        ClassFilterEntry(label=lab, count=hist[lab], kept=lab in keep)
        for lab in sorted(hist)
    )
    kept_records = tuple(r for r in d.records if r.label in keep)
    report = ClassFilterReport(
        threshold=threshold, entries=entries, before=len(d), after=len(kept_records)
    )
    return Dataset(kept_records, d.provenance), report


def encode_labels(train_labels) -> LabelEncoding:
    """Fit a label encoding on training labels only (transform rejects unseen)."""
    train_labels = list(train_labels)
    if not train_labels:
        raise DatasetError("cannot fit a label encoding on an empty label list")
    for lab in train_labels:
        if lab is None or not _labels.is_canonical(lab):
            raise DatasetError(f"cannot encode non-canonical label {lab!r}")
    return LabelEncoding(tuple(sorted(set(train_labels))))


def _apportion(quotas: list[float], total: int) -> list[int]:
    """Largest-remainder apportionment of ``total`` items over real quotas."""
    floors = [int(np.floor(q)) for q in quotas]
    remainder = total - sum(floors)
    # Ties on the fractional part resolve to the earlier (canonical) class.
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - floors[i]), i))
    out = floors[:]
    for i in order[:max(remainder, 0)]:
        out[i] += 1
    return out


def stratified_split(
    d: Dataset, test_fraction: float = 0.20, seed: int = 0
) -> tuple[Dataset, Dataset]:
    """Deterministic stratified train/test split.

    Per-class test counts come from largest-remainder apportionment of
    round(n * test_fraction) over the per-class quotas, so the split is
    proportion-preserving and totals always match.
    """
    if len(d) == 0:
        raise DatasetError("cannot split an empty dataset")
    d.require_labeled("stratified_split")
    if not (0.0 < test_fraction < 1.0):
        raise DatasetError("test_fraction must be in (0, 1)")

    by_class: dict[str, list[int]] = {}
    for i, r in enumerate(d.records):
        by_class.setdefault(r.label, []).append(i)  # type: ignore[arg-type]
    class_order = sorted(by_class)

    total_test = int(round(len(d) * test_fraction))
    quotas = [len(by_class[c]) * test_fraction for c in class_order]
    targets = _apportion(quotas, total_test)

    rng = np.random.default_rng(subseed(seed, "split"))
    test_idx: list[int] = []
    for c, t in zip(class_order, targets):
        idx = by_class[c]
        t = min(t, len(idx))
        perm = rng.permutation(len(idx))
        test_idx.extend(idx[p] for p in perm[:t])
    test_set = set(test_idx)
    train = d.subset([i for i in range(len(d)) if i not in test_set])
    test = d.subset(sorted(test_set))
    return train, test


@dataclass(frozen=True)
class AgreementReport:
    total: int
    agreements: int
    disagreements: int
    rate: float
    disagreeing_ids: tuple[str, ...]


def _normalize_segment(text: str) -> str:
    lines = [ln.rstrip() for ln in text.split("\n")]
    while lines and not lines[-1]:
        lines.pop()
    return "\n".join(lines)


def annotation_agreement(a: dict[str, str], b: dict[str, str]) -> AgreementReport:
    """Compare two annotators' id -> code_segment maps.

    A disagreement is any id whose two segments differ after trailing
    whitespace normalization.
    """
    if set(a) != set(b):
        only_a = sorted(set(a) - set(b))[:5]
        only_b = sorted(set(b) - set(a))[:5]
        raise DatasetError(f"id sets differ (only in a: {only_a}, only in b: {only_b})")
    if not a:
        raise DatasetError("cannot compute agreement on empty maps")
    disagreeing = sorted(
        i for i in a if _normalize_segment(a[i]) != _normalize_segment(b[i])
    )
    total = len(a)
    dis = len(disagreeing)
    return AgreementReport(
        total=total,
        agreements=total - dis,
        disagreements=dis,
        rate=(total - dis) / total,
        disagreeing_ids=tuple(disagreeing),
    )


def relabel(r: CommentRecord, label: str | None) -> CommentRecord:
    return replace(r, label=label)
