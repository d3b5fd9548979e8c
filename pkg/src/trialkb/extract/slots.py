"""Role-restricted slot filling.

Only a closed set of roles is ever extracted, each by its own narrow rule:
trial records yield performedBy and clinicalPhaseOf, team pages yield
chiefExecutiveOfficerOf/hasKeyPerson for persons near a title keyword,
contact pages yield isPhoneNumberOf for validated numbers. Mentions that
resolved to NIL never produce an assignment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from ..kb.models import ClinicalTrialRecord, Phase, PersonEntity
from ..kb.store import KnowledgeBase
from .folding import fold
from .linking import LinkedMention
from .phones import PhoneError, PhoneRuleSet, normalize_phone

PROXIMITY_CHARS = 120

TRIAL_SPONSOR_CONFIDENCE = 0.95
PHASE_CONFIDENCE = 1.0
TEAM_CONFIDENCE = 0.8
PHONE_CONFIDENCE = 0.9

CEO_TITLES = ("chief executive officer", "ceo")
KEY_PERSON_TITLES = (
    "chief technology officer", "chief financial officer", "chief operating officer",
    "chief scientific officer", "chief medical officer", "chief business officer",
    "cto", "cfo", "coo", "cso", "cmo", "cbo",
    "chairman", "chairwoman", "chair of the board", "board member",
    "member of the board", "president", "managing director", "head of research",
)

PROVISIONAL_PREFIX = "provisional:person:"

_PHONE_CANDIDATE_RE = re.compile(r"(?:\+|\b0)[0-9][0-9 ()\-./]{5,}[0-9]")
# lookahead keeps overlapping pairs visible ("Officer Elena" must not eat "Elena Fischer");
# the separator excludes line breaks so names never span lines
_BIGRAM_RE = re.compile(
    r"(?=\b([A-Z][a-zÀ-ɏ'’-]+[ \t]+[A-Z][a-zÀ-ɏ'’-]+)\b)"
)
_TITLE_WORDS = {
    "chief", "executive", "officer", "board", "member", "managing",
    "director", "head", "research", "president",
}


class SlotRole(Enum):
    CLINICAL_PHASE_OF = "clinicalPhaseOf"
    PERFORMED_BY = "performedBy"
    IS_PHONE_NUMBER_OF = "isPhoneNumberOf"
    CHIEF_EXECUTIVE_OFFICER_OF = "chiefExecutiveOfficerOf"
    HAS_KEY_PERSON = "hasKeyPerson"


@dataclass(frozen=True)
class SlotAssignment:
    subject: str
    role: SlotRole
    object: str
    confidence: float
    evidence_url: str
    evidence_span: tuple[int, int]
    evidence_excerpt: str = ""
    subject_name: str | None = None  # display name when subject is a person

    def triple(self) -> tuple[str, str, str]:
        return (self.subject, self.role.value, self.object)


@dataclass(frozen=True)
class SlotDocument:
    """Extraction context: either a parsed trial record or a classified page."""

    kind: str  # "trial" | "team" | "contact" | "about" | "other"
    url: str
    text: str = ""
    company_id: str | None = None
    company_country: str | None = None
    trial: ClinicalTrialRecord | None = None


def provisional_person_id(name: str) -> str:
    return PROVISIONAL_PREFIX + fold(name).replace(" ", "-")


def _title_spans(text: str) -> list[tuple[int, int, bool]]:
    """(start, end, is_ceo) spans of title keywords, longest titles first."""
    lowered = text.lower()
    spans: list[tuple[int, int, bool]] = []
    taken: list[tuple[int, int]] = []
    for is_ceo, titles in ((True, CEO_TITLES), (False, KEY_PERSON_TITLES)):
        for title in titles:
            for match in re.finditer(r"\b" + re.escape(title) + r"\b", lowered):
                span = (match.start(), match.end())
                if any(s < span[1] and span[0] < e for s, e in taken):
                    continue
                taken.append(span)
                spans.append((span[0], span[1], is_ceo))
    return spans


def _distance(a: tuple[int, int], b: tuple[int, int]) -> int:
    if a[1] <= b[0]:
        return b[0] - a[1]
    if b[1] <= a[0]:
        return a[0] - b[1]
    return 0


def _same_line(text: str, a: tuple[int, int], b: tuple[int, int]) -> bool:
    lo, hi = min(a[1], b[1]), max(a[0], b[0])
    return "\n" not in text[lo:hi] if lo < hi else True


def _is_person(kb: KnowledgeBase | None, entity_id: str) -> bool:
    if kb is None:
        return False
    try:
        return isinstance(kb.get(entity_id), PersonEntity)
    except KeyError:
        return False


def fill_slots(
    doc: SlotDocument,
    mentions: list[LinkedMention],
    kb: KnowledgeBase | None = None,
    phone_rules: PhoneRuleSet | None = None,
    proximity: int = PROXIMITY_CHARS,
) -> list[SlotAssignment]:
    if doc.kind == "trial":
        return _fill_trial(doc, mentions)
    if doc.kind == "team":
        return _fill_team(doc, mentions, kb, proximity)
    if doc.kind == "contact":
        return _fill_contact(doc, phone_rules)
    return []


def _fill_trial(doc: SlotDocument, mentions: list[LinkedMention]) -> list[SlotAssignment]:
    trial = doc.trial
    if trial is None:
        return []
    out = []
    for mention in mentions:
        if mention.is_nil:
            continue
        out.append(
            SlotAssignment(
                subject=trial.id,
                role=SlotRole.PERFORMED_BY,
                object=mention.resolved,
                confidence=TRIAL_SPONSOR_CONFIDENCE,
                evidence_url=doc.url,
                evidence_span=mention.span,
                evidence_excerpt=mention.surface,
            )
        )
    if trial.phase is not Phase.UNKNOWN:
        out.append(
            SlotAssignment(
                subject=trial.id,
                role=SlotRole.CLINICAL_PHASE_OF,
                object=trial.phase.value,
                confidence=PHASE_CONFIDENCE,
                evidence_url=doc.url,
                evidence_span=(0, 0),
            )
        )
    return out


def _fill_team(
    doc: SlotDocument,
    mentions: list[LinkedMention],
    kb: KnowledgeBase | None,
    proximity: int,
) -> list[SlotAssignment]:
    if doc.company_id is None:
        return []
    titles = _title_spans(doc.text)
    if not titles:
        return []
    out: list[SlotAssignment] = []
    seen: set[tuple[str, str]] = set()

    for mention in mentions:
        if mention.is_nil or not _is_person(kb, mention.resolved):
            continue
        best = _closest_title(doc.text, mention.span, titles, proximity)
        if best is None:
            continue
        role = SlotRole.CHIEF_EXECUTIVE_OFFICER_OF if best[2] else SlotRole.HAS_KEY_PERSON
        key = (mention.resolved, role.value)
        if key in seen:
            continue
        seen.add(key)
        out.append(
            SlotAssignment(
                subject=mention.resolved,
                role=role,
                object=doc.company_id,
                confidence=TEAM_CONFIDENCE,
                evidence_url=doc.url,
                evidence_span=mention.span,
                evidence_excerpt=_excerpt(doc.text, mention.span),
                subject_name=mention.surface,
            )
        )

    # capitalized bigram next to a title creates a provisional person;
    # it only enters the KB if a curator accepts the resulting event
    mention_spans = [m.span for m in mentions]
    for match in _BIGRAM_RE.finditer(doc.text):
        name = match.group(1)
        span = (match.start(1), match.start(1) + len(name))
        if any(_overlaps(span, other) for other in mention_spans):
            continue
        words = {w.lower() for w in name.split()}
        if words & _TITLE_WORDS:
            continue
        best = _closest_title(doc.text, span, titles, proximity, same_line_only=True)
        if best is None:
            continue
        role = SlotRole.CHIEF_EXECUTIVE_OFFICER_OF if best[2] else SlotRole.HAS_KEY_PERSON
        key = (provisional_person_id(name), role.value)
        if key in seen:
            continue
        seen.add(key)
        out.append(
            SlotAssignment(
                subject=provisional_person_id(name),
                role=role,
                object=doc.company_id,
                confidence=TEAM_CONFIDENCE,
                evidence_url=doc.url,
                evidence_span=span,
                evidence_excerpt=_excerpt(doc.text, span),
                subject_name=name,
            )
        )
    return out


def _overlaps(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def _closest_title(
    text: str,
    span: tuple[int, int],
    titles: list[tuple[int, int, bool]],
    proximity: int,
    same_line_only: bool = False,
) -> tuple[int, int, bool] | None:
    """Nearest title keyword within `proximity` chars; titles on the
    mention's own line always beat titles on neighboring lines."""
    nearby = [t for t in titles if _distance(span, (t[0], t[1])) <= proximity]
    same_line = [t for t in nearby if _same_line(text, span, (t[0], t[1]))]
    pool = same_line if (same_line or same_line_only) else nearby
    if not pool:
        return None
    return min(pool, key=lambda t: _distance(span, (t[0], t[1])))


def _excerpt(text: str, span: tuple[int, int], margin: int = 60) -> str:
    lo = max(0, span[0] - margin)
    hi = min(len(text), span[1] + margin)
    return text[lo:hi].strip()


def _fill_contact(doc: SlotDocument, phone_rules: PhoneRuleSet | None) -> list[SlotAssignment]:
    if doc.company_id is None:
        return []
    out = []
    seen: set[str] = set()
    for match in _PHONE_CANDIDATE_RE.finditer(doc.text):
        try:
            e164 = normalize_phone(match.group(), doc.company_country, phone_rules)
        except PhoneError:
            continue
        if e164 in seen:
            continue
        seen.add(e164)
        out.append(
            SlotAssignment(
                subject=doc.company_id,
                role=SlotRole.IS_PHONE_NUMBER_OF,
                object=e164,
                confidence=PHONE_CONFIDENCE,
                evidence_url=doc.url,
                evidence_span=match.span(),
                evidence_excerpt=_excerpt(doc.text, match.span()),
            )
        )
    return out
