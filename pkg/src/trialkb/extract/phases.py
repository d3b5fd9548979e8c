"""Clinical-phase normalization.

Registry vocabularies (arabic/roman numerals, slash and comma combos, EU
descriptive labels) map through a bundled table. The lookup key folds
case, whitespace and separator style; unmapped inputs come back UNKNOWN
and are logged so the table can grow.

Table file: data/phase_map.json, one JSON object mapping a lookup key
(any phase_key-normalized spelling) to a Phase enum name.
"""
from __future__ import annotations

import json
import logging
import re
from importlib import resources

from ..kb.models import Phase

logger = logging.getLogger(__name__)

_SEPARATORS_RE = re.compile(r"\s*[,+&]\s*|\s+and\s+")
_SLASH_SPACING_RE = re.compile(r"\s*/\s*")
_WS_RE = re.compile(r"\s+")

_TABLE: dict[str, Phase] | None = None


def phase_key(raw: str) -> str:
    """Lookup key: lowercase, separators unified to '/', whitespace squashed."""
    s = raw.strip().lower()
    s = _SEPARATORS_RE.sub("/", s)
    s = _SLASH_SPACING_RE.sub("/", s)
    s = _WS_RE.sub(" ", s)
    return s.rstrip(".").strip()


def _load_table() -> dict[str, Phase]:
    global _TABLE
    if _TABLE is None:
        raw = resources.files("trialkb.extract").joinpath("data/phase_map.json").read_text("utf-8")
        _TABLE = {phase_key(k): Phase(v) for k, v in json.loads(raw).items()}
    return _TABLE


def normalize_phase(raw: str | None) -> Phase:
    """Total function: every input maps to a Phase, unmappable ones to UNKNOWN."""
    if raw is None:
        return Phase.UNKNOWN
    key = phase_key(raw)
    if not key:
        return Phase.UNKNOWN
    table = _load_table()
    phase = table.get(key)
    if phase is None:
        logger.warning("unmapped clinical phase %r (key %r)", raw, key)
        return Phase.UNKNOWN
    return phase
