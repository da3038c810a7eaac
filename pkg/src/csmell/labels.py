"""Closed label vocabulary shared by the corpus, the evaluator and the LLM protocol.

Nine smell types plus ``not-a-smell``. The canonical form of a label is its
lowercase hyphenated name; integer encodings and report rows always follow
the lexicographic order of the canonical strings.
"""

from __future__ import annotations

import re

#: All ten canonical labels, lexicographically sorted.
CANONICAL_LABELS: tuple[str, ...] = (
    "beautification",
    "commented-out-code",
    "irrelevant",
    "misleading",
    "non-local-info",
    "not-a-smell",
    "obvious",
    "task",
    "too-much-info",
    "vague",
)

_CANONICAL_SET = frozenset(CANONICAL_LABELS)

#: Labels whose code context is irrelevant; their code field is the literal "NA".
NA_CATEGORY_LABELS: frozenset[str] = frozenset(
    {"beautification", "commented-out-code", "task"}
)

#: Sentinel stored in the code field of records without an associated segment.
NA_CODE = "NA"

#: Display spellings used in reports and prompts.
DISPLAY_NAMES: dict[str, str] = {
    "beautification": "Beautification",
    "commented-out-code": "Commented-out code",
    "irrelevant": "Irrelevant",
    "misleading": "Misleading",
    "non-local-info": "Non-local info",
    "not-a-smell": "Not a smell",
    "obvious": "Obvious",
    "task": "Task",
    "too-much-info": "Too much info",
    "vague": "Vague",
}

# Wordings that differ beyond spacing/hyphenation, which _squash already folds.
_EXTRA_ALIASES: dict[str, str] = {
    "non-local-information": "non-local-info",
    "too-much-information": "too-much-info",
}

_ALIAS_TABLE: dict[str, str] = {label: label for label in CANONICAL_LABELS}
_ALIAS_TABLE.update(_EXTRA_ALIASES)

_SURROUNDING_PUNCT = "\"'`*.,;:!?()[]{}<>"


def _squash(text: str) -> str:
    """Lowercase and fold space/underscore/hyphen runs into single hyphens."""
    text = text.strip().strip(_SURROUNDING_PUNCT).strip()
    text = re.sub(r"[\s_\-]+", "-", text.lower())
    return text.strip("-")


def canonicalize(text: str) -> str | None:
    """Map any known label spelling to canonical form; None if unknown."""
    return _ALIAS_TABLE.get(_squash(text))


def parse_label(text: str) -> str:
    """Parse a label alias strictly, raising ValueError on unknown spellings."""
    label = canonicalize(text)
    if label is None:
        raise ValueError(f"unknown smell label: {text!r}")
    return label


def display_name(label: str) -> str:
    return DISPLAY_NAMES[label]


def is_canonical(label: str) -> bool:
    return label in _CANONICAL_SET
