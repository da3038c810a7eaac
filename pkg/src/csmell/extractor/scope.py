"""Comment-to-code scope association heuristics.

Rule order, checked first match wins:

1. ``na-category``: the label hint is beautification / commented-out-code /
   task, whose code context is irrelevant; the segment is the literal "NA".
2. Trailing comment: the code it trails on the same line (single-line-above).
3. Comment followed by code on its own end line: that code (single-line-below).
4. First line inside a block opener (method/function/loop/conditional/try):
   the whole block. Checked before the adjacent-statement rules so a block's
   lead comment takes the block, not just the next statement.
5. Adjacent line below is a single complete statement: single-line-below.
6. Adjacent line above is a single complete statement: single-line-above.
7. Adjacent line below opens a block: block-level with the whole block.
8. Otherwise ambiguous: flagged for manual review, empty segment.

"Single complete statement" is a lexical test by design: Java lines ending
with ';' or '}' with balanced braces/parens; Python lines that neither open
a block nor take part in a continuation.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..labels import NA_CATEGORY_LABELS, NA_CODE
from .lexing import FileAnalysis, LineInfo

RULE_NA = "na-category"
RULE_ABOVE = "single-line-above"
RULE_BELOW = "single-line-below"
RULE_BLOCK = "block-level"
RULE_AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class ScopeDecision:
    rule: str
    segment: str
    segment_span: tuple[int, int] | None = None

    @property
    def needs_review(self) -> bool:
        return self.rule == RULE_AMBIGUOUS

    def __post_init__(self) -> None:
        if (self.rule == RULE_NA) != (self.segment == NA_CODE):
            raise ValueError("segment is 'NA' exactly for the na-category rule")
        if self.rule == RULE_AMBIGUOUS and self.segment:
            raise ValueError("ambiguous decisions carry no segment")


def _is_complete_statement(info: LineInfo, language: str) -> bool:
    if not info.has_code or info.is_continued or info.is_compound_header:
        return False
    if language == "java":
        code = info.code.strip()
        balanced = (
            info.brace_depth_after == info.brace_depth_before
            and info.paren_depth_after == info.paren_depth_before
        )
        return balanced and (code.endswith(";") or code.endswith("}"))
    return not info.continues_next


def _java_block_span(analysis: FileAnalysis, opener: int) -> tuple[int, int] | None:
    level = analysis.lines[opener - 1].brace_depth_after
    for m in range(opener + 1, len(analysis.lines) + 1):
        if analysis.lines[m - 1].brace_depth_after < level:
            return opener, m
    return None


def _python_block_span(analysis: FileAnalysis, opener: int) -> tuple[int, int] | None:
    base = analysis.lines[opener - 1].indent
    last = None
    for m in range(opener + 1, len(analysis.lines) + 1):
        info = analysis.lines[m - 1]
        if not info.has_code:
            # Blank and comment-only lines never terminate a block (Python's
            # own tokenizer ignores them for indentation), nor extend it.
            continue
        if info.is_continued or info.indent > base:
            last = m
            continue
        break
    return (opener, last) if last else None


def _block_span(analysis: FileAnalysis, opener: int, language: str) -> tuple[int, int] | None:
    if language == "java":
        return _java_block_span(analysis, opener)
    return _python_block_span(analysis, opener)


def _segment_text(analysis: FileAnalysis, span: tuple[int, int]) -> str:
    return "\n".join(
        analysis.lines[i - 1].raw.rstrip() for i in range(span[0], span[1] + 1)
    )


def _line_code(info: LineInfo) -> str:
    return info.code.strip()


def decide_scope(
    comment_start: int,
    comment_end: int,
    trailing: bool,
    code_after: bool,
    analysis: FileAnalysis,
    language: str,
    label_hint: str | None = None,
) -> ScopeDecision:
    if label_hint is not None and label_hint in NA_CATEGORY_LABELS:
        return ScopeDecision(RULE_NA, NA_CODE, None)

    start_info = analysis.line(comment_start)
    end_info = analysis.line(comment_end)
    above = analysis.line(comment_start - 1)
    below = analysis.line(comment_end + 1)

    if trailing and start_info is not None and start_info.has_code:
        return ScopeDecision(
            RULE_ABOVE, _line_code(start_info), (comment_start, comment_start)
        )
    if code_after and end_info is not None and end_info.has_code:
        return ScopeDecision(
            RULE_BELOW, _line_code(end_info), (comment_end, comment_end)
        )

    # Lead comment of a block body: take the whole block.
    if above is not None and above.has_code and above.opens_block:
        inside = True
        if language == "python" and start_info is not None:
            inside = start_info.indent > above.indent
        if inside:
            span = _block_span(analysis, above.number, language)
            if span is not None:
                return ScopeDecision(RULE_BLOCK, _segment_text(analysis, span), span)

    if below is not None and _is_complete_statement(below, language):
        return ScopeDecision(RULE_BELOW, _line_code(below), (below.number, below.number))
    if above is not None and _is_complete_statement(above, language):
        return ScopeDecision(RULE_ABOVE, _line_code(above), (above.number, above.number))

    if below is not None and below.has_code and below.opens_block:
        span = _block_span(analysis, below.number, language)
        if span is not None:
            return ScopeDecision(RULE_BLOCK, _segment_text(analysis, span), span)

    return ScopeDecision(RULE_AMBIGUOUS, "", None)
