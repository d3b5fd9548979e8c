"""Entity linking: longest-match gazetteer scan plus one coherence round.

Mentions with a single sufficiently-weighted candidate resolve directly;
ambiguous ones wait for coherence_rerank, which boosts candidates whose
domain tags overlap the tags of entities already resolved in the document.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from ..kb.store import KnowledgeBase
from .folding import tokenize_with_offsets
from .gazetteer import Gazetteer

NIL_THRESHOLD = 0.6
RERANK_MARGIN = 0.1
RERANK_BOOST = 0.5


@dataclass(frozen=True)
class LinkedMention:
    surface: str
    span: tuple[int, int]
    candidates: tuple[tuple[str, float], ...]  # (entity id, score), descending
    resolved: str | None
    confidence: float

    @property
    def is_nil(self) -> bool:
        return self.resolved is None


def link_mentions(
    text: str,
    gazetteer: Gazetteer,
    nil_threshold: float = NIL_THRESHOLD,
) -> list[LinkedMention]:
    """Longest-match scan over fold-normalized text at token boundaries.

    Overlaps resolve longest-first: after a match the scan continues past
    its last token. Multi-candidate mentions are left unresolved for
    coherence_rerank.
    """
    tokens = tokenize_with_offsets(text)
    folded = [t[0] for t in tokens]
    mentions: list[LinkedMention] = []
    i = 0
    n = len(tokens)
    while i < n:
        best_len = min(gazetteer.max_key_length(folded[i]), n - i)
        matched = False
        for length in range(best_len, 0, -1):
            key = tuple(folded[i : i + length])
            entries = gazetteer.candidates(key)
            if not entries:
                continue
            start = tokens[i][1]
            end = tokens[i + length - 1][2]
            surface_text = text[start:end]
            # acronym surfaces ("SBP") only match uppercase text, never "at"/"it"
            entries = [e for e in entries if not e.acronym or surface_text.isupper()]
            if not entries:
                continue
            candidates = tuple(
                sorted(
                    ((e.entity_id, e.weight) for e in entries),
                    key=lambda c: (-c[1], c[0]),
                )
            )
            resolved = None
            confidence = 0.0
            if len(candidates) == 1 and candidates[0][1] >= nil_threshold:
                resolved, confidence = candidates[0]
            mentions.append(
                LinkedMention(
                    surface=text[start:end],
                    span=(start, end),
                    candidates=candidates,
                    resolved=resolved,
                    confidence=confidence,
                )
            )
            i += length
            matched = True
            break
        if not matched:
            i += 1
    return mentions


def _jaccard(a: frozenset, b: frozenset | set) -> float:
    if not a and not b:
        return 0.0
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


def _entity_tags(kb: KnowledgeBase, entity_id: str) -> frozenset[str]:
    try:
        entity = kb.get(entity_id)
    except KeyError:
        return frozenset()
    return getattr(entity, "domain_tags", frozenset())


def coherence_rerank(
    mentions: list[LinkedMention],
    kb: KnowledgeBase,
    nil_threshold: float = NIL_THRESHOLD,
    margin: float = RERANK_MARGIN,
    boost: float = RERANK_BOOST,
) -> list[LinkedMention]:
    """One propagation round over a document's mentions.

    Context = union of domain tags of already-resolved entities. Each
    unresolved candidate's score is multiplied by (1 + boost * J) where J
    is its Jaccard overlap with the context; the mention resolves to the
    top candidate only if it clears the NIL threshold and beats the
    runner-up by the margin, otherwise it stays NIL.
    """
    context: set[str] = set()
    for mention in mentions:
        if mention.resolved is not None:
            context |= _entity_tags(kb, mention.resolved)

    out: list[LinkedMention] = []
    for mention in mentions:
        if mention.resolved is not None or not mention.candidates:
            out.append(mention)
            continue
        adjusted = [
            (eid, score * (1.0 + boost * _jaccard(_entity_tags(kb, eid), context)))
            for eid, score in mention.candidates
        ]
        adjusted.sort(key=lambda c: (-c[1], c[0]))
        top_id, top_score = adjusted[0]
        runner_up = adjusted[1][1] if len(adjusted) > 1 else None
        resolved = None
        confidence = 0.0
        if top_score >= nil_threshold and (runner_up is None or top_score - runner_up >= margin):
            resolved = top_id
            confidence = min(1.0, top_score)
        out.append(
            replace(
                mention,
                candidates=tuple((eid, min(1.0, s)) for eid, s in adjusted),
                resolved=resolved,
                confidence=confidence,
            )
        )
    return out
