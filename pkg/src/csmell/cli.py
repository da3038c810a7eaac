"""Command-line entry point wiring the pipeline modules together.

Option precedence is flag > config file > built-in default. The config file
is a flat ``key = value`` text format using the long option names (without
the leading dashes), '#' starts a comment line.

Exit codes: 0 success, 1 error, 2 success with items queued for review.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__, models
from ._util import sha256_file, sha256_json
from .corpus import (
    Dataset,
    dedup,
    load_dataset,
    remove_minority_classes,
    save_dataset,
)
from .evaluation import (
    EvalReport,
    confusion_csv,
    cross_validate,
    render_report,
    train_test_protocol,
)
from .extractor import associate_code_segment, extract_inline_comments, scan_tree
from .labels import DISPLAY_NAMES, NA_CODE
from .llm import (
    LlmParams,
    RetryPolicy,
    classify_remote,
    compare_runs,
    default_template,
    PromptTemplate,
    rule_based_transport,
    run_batch,
    score_predictions,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REVIEW = 2


def _load_config(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    config: dict[str, str] = {}
    for line_no, line in enumerate(Path(path).read_text("utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{line_no}: expected 'key = value'")
        key, value = stripped.split("=", 1)
        config[key.strip()] = value.strip()
    return config


class Resolver:
    """flag > config file > default, with typed casting for config values."""

    def __init__(self, args: argparse.Namespace, config: dict[str, str]):
        self.args = args
        self.config = config
        self.resolved: dict[str, object] = {}

    def get(self, name: str, default=None, cast=str):
        flag_value = getattr(self.args, name.replace("-", "_"), None)
        if flag_value is not None:
            value = flag_value
        elif name in self.config:
            raw = self.config[name]
            if cast is bool:
                value = raw.lower() in ("1", "true", "yes", "on")
            elif cast is list:
                value = [v.strip() for v in raw.split(",") if v.strip()]
            else:
                value = cast(raw)
        else:
            value = default
        self.resolved[name] = value
        return value

    def run_meta(self, seed=None, dataset_path=None) -> dict:
        meta = {
            "tool_version": __version__,
            "config_hash": sha256_json(
                {k: v for k, v in sorted(self.resolved.items()) if k != "out"}
            ),
            "seed": seed,
        }
        if dataset_path:
            meta["dataset_hash"] = sha256_file(dataset_path)
        return meta


def _write_json(path: Path, obj: dict) -> None:
    path.write_text(json.dumps(obj, indent=2), "utf-8")


def _out_dir(r: Resolver) -> Path:
    out = r.get("out", "out")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _parse_kinds(value) -> list[str]:
    if value in (None, "all") or value == ["all"]:
        return list(models.KINDS)
    if isinstance(value, str):
        value = [v.strip() for v in value.split(",") if v.strip()]
    for kind in value:
        if kind not in models.KINDS:
            raise ValueError(f"unknown model kind {kind!r}; expected {models.KINDS}")
    return list(value)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_extract(r: Resolver) -> int:
    root = r.get("root")
    if not root:
        raise ValueError("--root is required")
    include = r.get("include", ["*.java", "*.py"], cast=list)
    exclude = r.get("exclude", [], cast=list)
    project = r.get("project", Path(root).name)
    out = _out_dir(r)

    files = scan_tree(root, include_globs=include, exclude_globs=exclude)
    records = []
    review = []
    from .corpus import CommentRecord

    for src in files:
        rel = str(Path(src.path))
        for c in extract_inline_comments(src):
            decision = associate_code_segment(c, src)
            rid = f"{Path(src.path).relative_to(root).as_posix()}:{c.start_line}-{c.end_line}"
            if decision.needs_review:
                review.append(
                    {
                        "id": rid,
                        "file": rel,
                        "line_start": c.start_line,
                        "line_end": c.end_line,
                        "comment": c.text,
                        "reason": "ambiguous scope",
                    }
                )
            records.append(
                CommentRecord(
                    id=rid,
                    project=project,
                    language=src.language,
                    file_path=rel,
                    line_start=c.start_line,
                    line_end=c.end_line,
                    comment_text=c.text,
                    code_segment=decision.segment or NA_CODE,
                    label=None,
                )
            )

    dataset = Dataset(tuple(records))
    save_dataset(dataset, out / "records.csv", "csv")
    save_dataset(dataset, out / "records.jsonl", "jsonl")
    with open(out / "review_queue.jsonl", "w", encoding="utf-8") as f:
        for item in review:
            f.write(json.dumps(item, ensure_ascii=False) + "\n")
    _write_json(
        out / "extract_report.json",
        {
            "files_scanned": len(files),
            "comments": len(records),
            "ambiguous": len(review),
            "run_meta": r.run_meta(),
        },
    )
    print(f"extracted {len(records)} comments from {len(files)} files; "
          f"{len(review)} queued for review")
    return EXIT_REVIEW if review else EXIT_OK


def cmd_prepare(r: Resolver) -> int:
    dataset_path = r.get("dataset")
    if not dataset_path:
        raise ValueError("--dataset is required")
    threshold = r.get("threshold", 30, cast=int)
    out = _out_dir(r)

    d = load_dataset(dataset_path, r.get("format"))
    deduped, dd_report = dedup(d)
    filtered, cls_report = remove_minority_classes(deduped, threshold=threshold)
    save_dataset(filtered, out / "prepared.csv", "csv")
    save_dataset(filtered, out / "prepared.jsonl", "jsonl")
    _write_json(
        out / "prepare_report.json",
        {
            "dedup": asdict(dd_report),
            "class_filter": asdict(cls_report),
            "histogram": filtered.histogram(),
            "run_meta": r.run_meta(dataset_path=dataset_path),
        },
    )
    print(
        f"dedup {dd_report.before} -> {dd_report.after}; "
        f"minority filter (<{threshold}) -> {cls_report.after} records, "
        f"{len(filtered.histogram())} classes"
    )
    return EXIT_OK


def _pipeline_flags(r: Resolver) -> dict:
    return {
        "with_code": bool(r.get("with-code", False, cast=bool)),
        "keep_short_tokens": bool(r.get("keep-short-tokens", False, cast=bool)),
        "smote_k": r.get("smote-k", 5, cast=int),
    }


def cmd_train_eval(r: Resolver) -> int:
    dataset_path = r.get("dataset")
    if not dataset_path:
        raise ValueError("--dataset is required")
    kinds = _parse_kinds(r.get("kinds", "all"))
    seed = r.get("seed", 0, cast=int)
    test_fraction = r.get("test-fraction", 0.20, cast=float)
    flags = _pipeline_flags(r)
    out = _out_dir(r)

    d = load_dataset(dataset_path, r.get("format"))
    meta = r.run_meta(seed=seed, dataset_path=dataset_path)
    summary = {}
    for kind in kinds:
        spec = models.ModelSpec(kind, seed=seed)
        model, report = train_test_protocol(
            spec, d, test_fraction=test_fraction, seed=seed, **flags
        )
        report.metadata["run_meta"] = meta
        models.save_model(model, out / f"{kind}.model")
        _write_json(out / f"{kind}.report.json", report.to_dict())
        (out / f"{kind}.report.txt").write_text(
            render_report(report, display=lambda l: DISPLAY_NAMES.get(l, str(l))) + "\n",
            "utf-8",
        )
        (out / f"{kind}.confusion.csv").write_text(confusion_csv(report.confusion), "utf-8")
        summary[kind] = {"accuracy": report.accuracy, "mcc": report.mcc}
        print(f"{kind:20s} accuracy={report.accuracy:.2f} mcc={report.mcc:.2f}")
    _write_json(out / "summary.json", {"models": summary, "run_meta": meta})
    return EXIT_OK


def cmd_cv(r: Resolver) -> int:
    dataset_path = r.get("dataset")
    if not dataset_path:
        raise ValueError("--dataset is required")
    kinds = _parse_kinds(r.get("kinds", "all"))
    seed = r.get("seed", 0, cast=int)
    k = r.get("k", 10, cast=int)
    flags = _pipeline_flags(r)
    out = _out_dir(r)

    d = load_dataset(dataset_path, r.get("format"))
    meta = r.run_meta(seed=seed, dataset_path=dataset_path)
    rows = []
    summary = {}
    for kind in kinds:
        result = cross_validate(models.ModelSpec(kind, seed=seed), d, k=k, seed=seed, **flags)
        _write_json(out / f"{kind}.cv.json", result.to_dict())
        rows.append((kind, result.mean_mcc, result.mean_accuracy))
        summary[kind] = {"mean_mcc": result.mean_mcc, "mean_accuracy": result.mean_accuracy}
        print(f"{kind:20s} mean_mcc={result.mean_mcc:.2f} mean_accuracy={result.mean_accuracy:.2f}")
    table = ["Model                 MCC   Accuracy"]
    for kind, mcc_v, acc in rows:
        table.append(f"{kind:20s} {mcc_v:5.2f}  {acc:5.2f}")
    (out / "cv_table.txt").write_text("\n".join(table) + "\n", "utf-8")
    _write_json(out / "cv_summary.json", {"models": summary, "k": k, "run_meta": meta})
    return EXIT_OK


def cmd_llm(r: Resolver) -> int:
    dataset_path = r.get("dataset")
    if not dataset_path:
        raise ValueError("--dataset is required")
    include_code = bool(r.get("include-code", False, cast=bool))
    backend = r.get("backend", "openai")
    cache_dir = r.get("cache-dir", "llm-cache")
    template_path = r.get("template")
    out = _out_dir(r)

    params = LlmParams(
        model=r.get("model", "gpt-4"),
        temperature=r.get("temperature", 0.2, cast=float),
        max_tokens=r.get("max-tokens", 10, cast=int),
        top_p=r.get("top-p", 0.1, cast=float),
        endpoint=r.get("endpoint", "https://api.openai.com/v1/chat/completions"),
        timeout=r.get("timeout", 60.0, cast=float),
        retry=RetryPolicy(max_attempts=r.get("max-retries", 3, cast=int)),
        concurrency=r.get("concurrency", 4, cast=int),
    )
    template = (
        PromptTemplate.from_json(Path(template_path).read_text("utf-8"))
        if template_path
        else default_template()
    )
    transport = {"openai": classify_remote, "rule": rule_based_transport}.get(backend)
    if transport is None:
        raise ValueError(f"unknown backend {backend!r}; expected openai or rule")

    d = load_dataset(dataset_path, r.get("format"))
    predictions, manifest = run_batch(
        d, template, params, include_code=include_code, cache_dir=cache_dir,
        transport=transport,
    )
    with open(out / "predictions.jsonl", "w", encoding="utf-8") as f:
        for p in predictions:
            f.write(
                json.dumps(
                    {
                        "id": p.record_id,
                        "raw_response": p.raw_response,
                        "label": p.label,
                        "from_cache": p.from_cache,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    (out / "manifest.json").write_text(manifest.to_json(), "utf-8")

    if all(rec.label is not None for rec in d):
        report = score_predictions(d, predictions)
        report.metadata["run_meta"] = r.run_meta(dataset_path=dataset_path)
        report.metadata["include_code"] = include_code
        _write_json(out / "report.json", report.to_dict())
        (out / "report.txt").write_text(
            render_report(report, display=lambda l: DISPLAY_NAMES.get(l, str(l))) + "\n",
            "utf-8",
        )
        print(
            f"llm run: accuracy={report.accuracy:.2f} mcc={report.mcc:.2f} "
            f"unparseable={report.metadata['unparseable_count']}"
        )
    else:
        print("llm run complete (no gold labels; predictions written, no report)")
    return EXIT_OK


def cmd_compare(r: Resolver) -> int:
    path_a = r.get("report-a")
    path_b = r.get("report-b")
    if not path_a or not path_b:
        raise ValueError("--report-a and --report-b are required")
    out = _out_dir(r)
    a = EvalReport.from_json(Path(path_a).read_text("utf-8"))
    b = EvalReport.from_json(Path(path_b).read_text("utf-8"))
    comparison = compare_runs(a, b)
    _write_json(out / "comparison.json", comparison.to_dict())
    text = comparison.render_text()
    (out / "comparison.txt").write_text(text + "\n", "utf-8")
    print(text)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csmell",
        description="Inline code comment smell extraction and classification",
    )
    parser.add_argument("--version", action="version", version=f"csmell {__version__}")
    parser.add_argument("--config", help="key = value config file (flag > config > default)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract inline comments from a source tree")
    p.add_argument("--root")
    p.add_argument("--include", action="append")
    p.add_argument("--exclude", action="append")
    p.add_argument("--project")
    p.add_argument("--out")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("prepare", help="dedup and minority-filter a labeled dataset")
    p.add_argument("--dataset")
    p.add_argument("--format", choices=["csv", "jsonl"])
    p.add_argument("--threshold", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_prepare)

    for name, fn, extra in (
        ("train-eval", cmd_train_eval, True),
        ("cv", cmd_cv, True),
    ):
        p = sub.add_parser(
            name,
            help="80:20 train/evaluate" if name == "train-eval" else "stratified k-fold CV",
        )
        p.add_argument("--dataset")
        p.add_argument("--format", choices=["csv", "jsonl"])
        p.add_argument("--kinds")
        p.add_argument("--seed", type=int)
        if name == "train-eval":
            p.add_argument("--test-fraction", type=float)
        else:
            p.add_argument("--k", type=int)
        p.add_argument("--with-code", action=argparse.BooleanOptionalAction)
        p.add_argument("--keep-short-tokens", action=argparse.BooleanOptionalAction)
        p.add_argument("--smote-k", type=int)
        p.add_argument("--out")
        p.set_defaults(func=fn)

    p = sub.add_parser("llm", help="classify records through the LLM protocol")
    p.add_argument("--dataset")
    p.add_argument("--format", choices=["csv", "jsonl"])
    p.add_argument("--template")
    p.add_argument("--include-code", action=argparse.BooleanOptionalAction)
    p.add_argument("--cache-dir")
    p.add_argument("--backend", choices=["openai", "rule"])
    p.add_argument("--model")
    p.add_argument("--temperature", type=float)
    p.add_argument("--top-p", type=float)
    p.add_argument("--max-tokens", type=int)
    p.add_argument("--endpoint")
    p.add_argument("--timeout", type=float)
    p.add_argument("--max-retries", type=int)
    p.add_argument("--concurrency", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_llm)

    p = sub.add_parser("compare", help="per-class F1 deltas between two reports")
    p.add_argument("--report-a")
    p.add_argument("--report-b")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        resolver = Resolver(args, config)
        return args.func(resolver)
    except Exception as exc:  # noqa: BLE001 - single CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
