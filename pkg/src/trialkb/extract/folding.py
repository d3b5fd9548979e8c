"""Surface-form folding shared by the gazetteer, the linker and the fixtures.

Folding: unicode-decompose, drop combining marks, casefold, squash every
non-alphanumeric run to a single space.
"""
from __future__ import annotations

import re
import unicodedata

_NON_ALNUM_RE = re.compile(r"[^0-9a-z]+")
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def fold(text: str) -> str:
    decomposed = unicodedata.normalize("NFKD", text)
    stripped = "".join(ch for ch in decomposed if not unicodedata.combining(ch))
    return _NON_ALNUM_RE.sub(" ", stripped.casefold()).strip()


def fold_tokens(text: str) -> tuple[str, ...]:
    return tuple(fold(text).split())


def tokenize_with_offsets(text: str) -> list[tuple[str, int, int]]:
    """Word tokens with [start, end) character offsets into the raw text.

    Per-token folding matches fold() of the covering slice, so gazetteer
    keys built with fold_tokens align with document scans.
    """
    out = []
    for match in _TOKEN_RE.finditer(text):
        folded = fold(match.group())
        if folded:
            out.append((folded, match.start(), match.end()))
    return out
