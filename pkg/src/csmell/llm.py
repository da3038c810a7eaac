"""Remote LLM classification protocol: prompts, transport, caching, scoring.

One chat-completion request per record with pinned sampling parameters
(temperature 0.2, top_p 0.1, max_tokens 10). Responses are cached per record
so interrupted batches resume without re-sending, and a deterministic
offline rule-based transport ships for CI runs without credentials.
"""

from __future__ import annotations

import datetime as _dt
import json
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import requests

from ._util import sha256_json
from . import labels as _labels
from .corpus import CommentRecord, Dataset
from .evaluation import EvalReport, class_metrics, confusion_matrix

#: Sentinel label for responses that normalize to none of the ten categories.
UNPARSEABLE = "unparseable"


class LlmError(RuntimeError):
    pass


class AuthError(LlmError):
    pass


class TransportError(LlmError):
    pass


class ProtocolError(LlmError):
    pass


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    backoff_base: float = 0.5
    backoff_factor: float = 2.0


@dataclass(frozen=True)
class LlmParams:
    model: str = "gpt-4"
    temperature: float = 0.2
    max_tokens: int = 10
    top_p: float = 0.1
    endpoint: str = "https://api.openai.com/v1/chat/completions"
    timeout: float = 60.0
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    api_key_env: str = "OPENAI_API_KEY"
    concurrency: int = 4

    def sampling_dict(self) -> dict:
        """The fields that identify a sampling configuration (cache key part)."""
        return {
            "model": self.model,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
            "top_p": self.top_p,
        }


@dataclass(frozen=True)
class CategoryEntry:
    name: str
    description: str
    example: str


@dataclass(frozen=True)
class PromptTemplate:
    preamble: str
    categories: tuple[CategoryEntry, ...]
    comment_header: str = "Comment:"
    code_header: str = "Code:"

    def __post_init__(self) -> None:
        seen = [
            _labels.canonicalize(c.name) for c in self.categories
        ]
        if None in seen:
            bad = [c.name for c, s in zip(self.categories, seen) if s is None]
            raise ValueError(f"template categories not in the taxonomy: {bad}")
        if sorted(seen) != sorted(_labels.CANONICAL_LABELS):
            raise ValueError(
                "template must list each of the 10 categories exactly once; "
                f"got {seen}"
            )

    def hash(self) -> str:
        return sha256_json(
            {
                "preamble": self.preamble,
                "categories": [vars(c) for c in self.categories],
                "comment_header": self.comment_header,
                "code_header": self.code_header,
            }
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "format": "csmell-prompt-template",
                "version": 1,
                "preamble": self.preamble,
                "categories": [vars(c) for c in self.categories],
                "comment_header": self.comment_header,
                "code_header": self.code_header,
            },
            indent=2,
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, text: str) -> "PromptTemplate":
        obj = json.loads(text)
        if obj.get("format") != "csmell-prompt-template":
            raise ValueError("not a prompt template file")
        return cls(
            preamble=obj["preamble"],
            categories=tuple(CategoryEntry(**c) for c in obj["categories"]),
            comment_header=obj.get("comment_header", "Comment:"),
            code_header=obj.get("code_header", "Code:"),
        )


def default_template() -> PromptTemplate:
    text = resources.files("csmell.data").joinpath("prompt_template.json").read_text("utf-8")
    return PromptTemplate.from_json(text)


def build_prompt(
    r: CommentRecord, t: PromptTemplate, include_code: bool = False
) -> str:
    """Render the taxonomy prompt for one record (deterministic)."""
    parts = [t.preamble, ""]
    for i, cat in enumerate(t.categories, start=1):
        parts.append(f"{i}. {cat.name}: {cat.description} Example: {cat.example}")
    parts.append("")
    parts.append(t.comment_header)
    parts.append(r.comment_text)
    if include_code:
        parts.append("")
        parts.append(t.code_header)
        parts.append(r.code_segment)  # the literal "NA" for NA-category rows
    return "\n".join(parts)


def normalize_label(raw: str) -> str:
    """Map a model response to a canonical label, else UNPARSEABLE.

    Lowercases, strips surrounding punctuation/quotes, collapses internal
    whitespace and folds space/underscore/hyphen variants; only an exact
    alias match counts (never a fuzzy coercion). Idempotent and total.
    """
    collapsed = re.sub(r"\s+", " ", raw).strip()
    label = _labels.canonicalize(collapsed)
    return label if label is not None else UNPARSEABLE


def classify_remote(prompt: str, p: LlmParams, _sleep=time.sleep) -> str:
    """Send one chat-completion request and return the assistant text verbatim.

    Retries transient failures (connection errors, timeouts, HTTP 429/5xx)
    with exponential backoff; auth failures and malformed envelopes do not
    retry.
    """
    api_key = os.environ.get(p.api_key_env)
    if not api_key:
        raise AuthError(
            f"no API key: set the {p.api_key_env} environment variable"
        )
    body = {
        "model": p.model,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": p.temperature,
        "top_p": p.top_p,
        "max_tokens": p.max_tokens,
    }
    headers = {"Authorization": f"Bearer {api_key}"}
    last_error: Exception | None = None
    for attempt in range(p.retry.max_attempts):
        if attempt:
            _sleep(p.retry.backoff_base * p.retry.backoff_factor ** (attempt - 1))
        try:
            resp = requests.post(p.endpoint, json=body, headers=headers, timeout=p.timeout)
        except requests.RequestException as exc:
            last_error = exc
            continue
        if resp.status_code in (401, 403):
            raise AuthError(f"authentication failed: HTTP {resp.status_code}")
        if resp.status_code == 429 or resp.status_code >= 500:
            last_error = TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            continue
        if resp.status_code != 200:
            raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            payload = resp.json()
            content = payload["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProtocolError(f"malformed response envelope: {exc}") from exc
        if not isinstance(content, str):
            raise ProtocolError("assistant content is not a string")
        return content
    raise TransportError(
        f"request failed after {p.retry.max_attempts} attempts: {last_error}"
    )


def rule_based_transport(prompt: str, p: LlmParams) -> str:
    """Deterministic offline classifier standing in for the remote model.

    Keyword rules over the comment section of the prompt; useful for CI and
    protocol tests, not for accuracy claims.
    """
    comment = _comment_section(prompt)
    lowered = comment.lower()
    stripped = comment.strip()
    if re.search(r"\b(todo|fixme|xxx|hack)\b", lowered):
        return "Task"
    if not re.search(r"[a-zA-Z]", stripped):
        return "Beautification"
    if stripped.endswith((";", "{", "}")) or re.match(r"^[\w.\[\]]+ ?[(=]", stripped):
        return "Commented-out code"
    if "?" in stripped:
        return "Vague"
    if len(stripped) < 16:
        return "Obvious"
    return "Not a smell"


def _comment_section(prompt: str) -> str:
    lines = prompt.split("\n")
    try:
        idx = max(i for i, ln in enumerate(lines) if ln.strip().endswith("Comment:"))
    except ValueError:
        return prompt
    rest = lines[idx + 1 :]
    out = []
    for ln in rest:
        if ln.strip().endswith("Code:"):
            break
        out.append(ln)
    return "\n".join(out).strip()


@dataclass(frozen=True)
class LlmPrediction:
    record_id: str
    raw_response: str
    label: str  # canonical label or UNPARSEABLE
    requested_at: str
    responded_at: str
    token_usage: dict | None = None
    from_cache: bool = False


@dataclass
class RunManifest:
    dataset_hash: str
    include_code: bool
    params: dict
    template_hash: str
    cache_keys: dict[str, str]
    completed: dict[str, bool]

    def to_json(self) -> str:
        return json.dumps(
            {
                "format": "csmell-llm-manifest",
                "version": 1,
                "dataset_hash": self.dataset_hash,
                "include_code": self.include_code,
                "params": self.params,
                "template_hash": self.template_hash,
                "cache_keys": self.cache_keys,
                "completed": self.completed,
            },
            indent=2,
        )


def cache_key(record_id: str, template_hash: str, p: LlmParams, include_code: bool) -> str:
    return sha256_json(
        {
            "record_id": record_id,
            "template_hash": template_hash,
            "params": p.sampling_dict(),
            "include_code": include_code,
        }
    )


def _dataset_hash(d: Dataset) -> str:
    return sha256_json([[r.id, r.comment_text, r.code_segment, r.label] for r in d])


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


def run_batch(
    d: Dataset,
    t: PromptTemplate,
    p: LlmParams,
    include_code: bool = False,
    cache_dir: str | Path = "llm-cache",
    transport=None,
) -> tuple[list[LlmPrediction], RunManifest]:
    """Classify every record, one request per record, resuming from cache.

    Responses are cached as one JSON file per record keyed by (record id,
    template hash, sampling params, include_code); a rerun with a warm cache
    issues zero requests. Results are ordered by dataset record order.
    """
    if transport is None:
        transport = classify_remote
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    template_hash = t.hash()

    keys = {r.id: cache_key(r.id, template_hash, p, include_code) for r in d}
    cached: dict[str, LlmPrediction] = {}
    missing: list[CommentRecord] = []
    for r in d:
        path = cache_dir / f"{keys[r.id]}.json"
        if path.exists():
            obj = json.loads(path.read_text("utf-8"))
            cached[r.id] = LlmPrediction(
                record_id=r.id,
                raw_response=obj["raw_response"],
                label=obj["label"],
                requested_at=obj["requested_at"],
                responded_at=obj["responded_at"],
                token_usage=obj.get("token_usage"),
                from_cache=True,
            )
        else:
            missing.append(r)

    def classify(r: CommentRecord) -> LlmPrediction:
        prompt = build_prompt(r, t, include_code)
        requested = _now()
        raw = transport(prompt, p)
        return LlmPrediction(
            record_id=r.id,
            raw_response=raw,
            label=normalize_label(raw),
            requested_at=requested,
            responded_at=_now(),
        )

    fresh: dict[str, LlmPrediction] = {}
    errors: list[tuple[str, Exception]] = []
    if missing:
        with ThreadPoolExecutor(max_workers=max(1, p.concurrency)) as pool:
            for r, outcome in zip(missing, pool.map(lambda r: _attempt(classify, r), missing)):
                if isinstance(outcome, Exception):
                    errors.append((r.id, outcome))
                    continue
                fresh[r.id] = outcome
                tmp = cache_dir / f"{keys[r.id]}.json.tmp"
                tmp.write_text(
                    json.dumps(
                        {
                            "record_id": r.id,
                            "raw_response": outcome.raw_response,
                            "label": outcome.label,
                            "requested_at": outcome.requested_at,
                            "responded_at": outcome.responded_at,
                            "token_usage": outcome.token_usage,
                        }
                    ),
                    "utf-8",
                )
                os.replace(tmp, cache_dir / f"{keys[r.id]}.json")

    manifest = RunManifest(
        dataset_hash=_dataset_hash(d),
        include_code=include_code,
        params={**p.sampling_dict(), "endpoint": p.endpoint},
        template_hash=template_hash,
        cache_keys=keys,
        completed={r.id: (r.id in cached or r.id in fresh) for r in d},
    )
    (cache_dir / "manifest.json").write_text(manifest.to_json(), "utf-8")

    if errors:
        failed = ", ".join(i for i, _ in errors[:5])
        raise TransportError(
            f"{len(errors)} record(s) failed (completed work is cached; "
            f"rerun to resume): first failures {failed}"
        ) from errors[0][1]

    predictions = [cached.get(r.id) or fresh[r.id] for r in d]
    return predictions, manifest


def _attempt(fn, arg):
    try:
        return fn(arg)
    except Exception as exc:  # noqa: BLE001 - reported per record
        return exc


def score_predictions(d: Dataset, predictions: list[LlmPrediction]) -> EvalReport:
    """Evaluate predictions against gold labels over all ten categories.

    Unparseable responses enter the confusion matrix as an eleventh
    prediction-only column, so they score as wrong for every gold class;
    macro/weighted averages run over the ten real categories only, and the
    unparseable count is reported separately in the metadata.
    """
    d.require_labeled("score_predictions")
    by_id = {pred.record_id: pred for pred in predictions}
    missing = [r.id for r in d if r.id not in by_id]
    if missing:
        raise LlmError(f"missing predictions for records: {missing[:5]}")
    y_true = [r.label for r in d]
    y_pred = [by_id[r.id].label for r in d]
    labels = _labels.CANONICAL_LABELS + (UNPARSEABLE,)
    cm = confusion_matrix(y_true, y_pred, labels)
    report = class_metrics(cm, average_labels=_labels.CANONICAL_LABELS)
    report.metadata.update(
        {
            "unparseable_count": sum(1 for p in y_pred if p == UNPARSEABLE),
            "n_records": len(d),
        }
    )
    return report


@dataclass(frozen=True)
class RunComparison:
    labels: tuple[str, ...]
    f1_delta: dict[str, float]
    accuracy_delta: float
    mcc_delta: float

    def to_dict(self) -> dict:
        return {
            "schema": "csmell-comparison/1",
            "f1_delta": self.f1_delta,
            "accuracy_delta": self.accuracy_delta,
            "mcc_delta": self.mcc_delta,
        }

    def render_text(self) -> str:
        width = max(len(_labels.DISPLAY_NAMES.get(l, l)) for l in self.labels)
        lines = [f"{'Category':<{width}}  Increase in F1-Score"]
        for lab in self.labels:
            name = _labels.DISPLAY_NAMES.get(lab, lab)
            lines.append(f"{name:<{width}}  {self.f1_delta[lab]:+.2f}")
        lines.append(f"{'Accuracy':<{width}}  {self.accuracy_delta:+.2f}")
        lines.append(f"{'MCC':<{width}}  {self.mcc_delta:+.2f}")
        return "\n".join(lines)


def compare_runs(a: EvalReport, b: EvalReport) -> RunComparison:
    """Per-class F1 deltas (b minus a) plus accuracy and MCC deltas."""
    a_labels = tuple(l for l in a.per_class if l != UNPARSEABLE)
    b_labels = tuple(l for l in b.per_class if l != UNPARSEABLE)
    if set(a_labels) != set(b_labels):
        raise LlmError(
            f"label sets differ: {sorted(set(a_labels) ^ set(b_labels))}"
        )
    labels = tuple(sorted(a_labels))
    return RunComparison(
        labels=labels,
        f1_delta={l: b.per_class[l].f1 - a.per_class[l].f1 for l in labels},
        accuracy_delta=b.accuracy - a.accuracy,
        mcc_delta=b.mcc - a.mcc,
    )
