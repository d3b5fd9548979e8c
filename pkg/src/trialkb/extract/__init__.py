from .folding import fold, fold_tokens, tokenize_with_offsets
from .gazetteer import Gazetteer, GazetteerEntry, build_gazetteer
from .linking import LinkedMention, coherence_rerank, link_mentions
from .phases import normalize_phase, phase_key
from .phones import CountryPhoneRule, PhoneError, PhoneRuleSet, bundled_rules, normalize_phone
from .slots import (
    SlotAssignment,
    SlotDocument,
    SlotRole,
    fill_slots,
    provisional_person_id,
)
from .variants import generate_name_variants, initialism, strip_legal_suffix

__all__ = [
    "fold",
    "fold_tokens",
    "tokenize_with_offsets",
    "Gazetteer",
    "GazetteerEntry",
    "build_gazetteer",
    "LinkedMention",
    "coherence_rerank",
    "link_mentions",
    "normalize_phase",
    "phase_key",
    "CountryPhoneRule",
    "PhoneError",
    "PhoneRuleSet",
    "bundled_rules",
    "normalize_phone",
    "SlotAssignment",
    "SlotDocument",
    "SlotRole",
    "fill_slots",
    "provisional_person_id",
    "generate_name_variants",
    "initialism",
    "strip_legal_suffix",
]
