"""Shared helpers: deterministic seed substreams and content hashing."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path


def subseed(seed: int, *parts: object) -> int:
    """Derive a named RNG substream seed from a master seed.

    Every source of randomness in a run is seeded through this function so a
    single user-visible seed fans out into independent, reproducible streams
    (split, smote, per-model, per-tree, ...). Stable across platforms and
    Python versions (no reliance on hash()).
    """
    tag = "|".join([str(int(seed))] + [str(p) for p in parts])
    digest = hashlib.sha256(tag.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def canonical_json(obj: object) -> str:
    """JSON with sorted keys and no whitespace, for stable hashing."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def sha256_json(obj: object) -> str:
    return sha256_text(canonical_json(obj))
