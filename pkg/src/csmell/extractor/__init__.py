"""Inline comment extraction from Java and Python sources.

Extraction is purely lexical (string/char/text-block aware), so it works on
files that do not compile. Documentation comments are never emitted: Javadoc
``/** ... */`` blocks are skipped by the lexer, and Python docstrings are
string literals, which the ``#``-comment lexer never treats as comments.
Consecutive own-line line comments at the same column with no blank line
between them merge into one logical comment.
"""

from __future__ import annotations

import fnmatch
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from ..labels import NA_CODE
from .lexing import FileAnalysis, RawComment, lex_java, lex_python
from .scope import (
    RULE_ABOVE,
    RULE_AMBIGUOUS,
    RULE_BELOW,
    RULE_BLOCK,
    RULE_NA,
    ScopeDecision,
    decide_scope,
)

__all__ = [
    "SourceFile",
    "InlineComment",
    "ScopeDecision",
    "extract_inline_comments",
    "associate_code_segment",
    "scan_tree",
    "RULE_NA",
    "RULE_ABOVE",
    "RULE_BELOW",
    "RULE_BLOCK",
    "RULE_AMBIGUOUS",
]

_EXTENSION_LANGUAGE = {".java": "java", ".py": "python"}


class ExtractionError(ValueError):
    pass


@dataclass
class SourceFile:
    path: str
    language: str  # "java" | "python"
    lines: list[str]  # raw text lines, 1-based access via line numbers
    _analysis: FileAnalysis | None = field(default=None, repr=False, compare=False)

    @classmethod
    def from_path(cls, path: str | Path, language: str | None = None) -> "SourceFile":
        path = Path(path)
        if language is None:
            language = _EXTENSION_LANGUAGE.get(path.suffix.lower())
            if language is None:
                raise ExtractionError(f"cannot infer language for {path}")
        try:
            data = path.read_bytes()
        except OSError as exc:
            raise ExtractionError(f"cannot read {path}: {exc}") from exc
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError:
            warnings.warn(f"{path}: not valid UTF-8, decoding with replacement")
            text = data.decode("utf-8", errors="replace")
        return cls(path=str(path), language=language, lines=text.split("\n"))

    def analysis(self) -> FileAnalysis:
        if self._analysis is None:
            lexer = lex_java if self.language == "java" else lex_python
            self._analysis = lexer(self.lines)
        return self._analysis


@dataclass(frozen=True)
class InlineComment:
    file_path: str
    start_line: int
    end_line: int
    start_col: int
    text: str
    kind: str  # "line" | "block"
    position_context: str  # "own-line" | "trailing"
    code_after: bool = False


def _merge_line_comments(raw: list[RawComment]) -> list[list[RawComment]]:
    """Group consecutive own-line line comments at the same column."""
    groups: list[list[RawComment]] = []
    for c in raw:
        if groups:
            prev = groups[-1][-1]
            if (
                c.kind == "line"
                and prev.kind == "line"
                and not c.trailing
                and not prev.trailing
                and c.start_line == prev.end_line + 1
                and c.start_col == prev.start_col
            ):
                groups[-1].append(c)
                continue
        groups.append([c])
    return groups


def extract_inline_comments(src: SourceFile) -> list[InlineComment]:
    """All inline comments of a file in document order."""
    analysis = src.analysis()
    raw = sorted(analysis.comments, key=lambda c: (c.start_line, c.start_col))
    out: list[InlineComment] = []
    for group in _merge_line_comments(raw):
        first, last = group[0], group[-1]
        text = "\n".join(c.text for c in group) if len(group) > 1 else first.text
        if not text.strip():
            continue  # pure delimiter noise like a bare '//'
        out.append(
            InlineComment(
                file_path=src.path,
                start_line=first.start_line,
                end_line=last.end_line,
                start_col=first.start_col,
                text=text,
                kind=first.kind,
                position_context="trailing" if first.trailing else "own-line",
                code_after=last.code_after,
            )
        )
    return out


def associate_code_segment(
    c: InlineComment, src: SourceFile, label_hint: str | None = None
) -> ScopeDecision:
    """Resolve the code segment a comment describes (see scope rule order).

    Without a label hint (production inference, labels unknown) the
    na-category rule is skipped and association is always attempted.
    """
    if c.file_path != src.path:
        raise ExtractionError(
            f"comment from {c.file_path!r} does not belong to {src.path!r}"
        )
    return decide_scope(
        comment_start=c.start_line,
        comment_end=c.end_line,
        trailing=c.position_context == "trailing",
        code_after=c.code_after,
        analysis=src.analysis(),
        language=src.language,
        label_hint=label_hint,
    )


def _matches(rel_posix: str, patterns) -> bool:
    return any(
        fnmatch.fnmatch(rel_posix, pat) or fnmatch.fnmatch("/" + rel_posix, pat)
        for pat in patterns
    )


def _looks_binary(path: Path) -> bool:
    try:
        with open(path, "rb") as f:
            return b"\0" in f.read(8192)
    except OSError:
        return True


def scan_tree(
    root: str | Path,
    include_globs=("*.java", "*.py"),
    exclude_globs=(),
) -> list[SourceFile]:
    """Collect source files under root in deterministic lexicographic order.

    Globs use fnmatch semantics against the path relative to root ('*'
    crosses directory separators, so '*.java' matches at any depth and
    '**/test/**' excludes test directories).
    """
    root = Path(root)
    if not root.is_dir():
        raise ExtractionError(f"root directory not found: {root}")
    files: list[SourceFile] = []
    for path in sorted(p for p in root.rglob("*") if p.is_file()):
        rel = path.relative_to(root).as_posix()
        if not _matches(rel, include_globs):
            continue
        if exclude_globs and _matches(rel, exclude_globs):
            continue
        if path.suffix.lower() not in _EXTENSION_LANGUAGE:
            continue
        if _looks_binary(path):
            continue
        files.append(SourceFile.from_path(path))
    return files
