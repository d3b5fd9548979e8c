"""Surface-form gazetteer built from the knowledge base.

Maps fold-normalized surfaces to candidate entities with base weights:
canonical 1.0 > alias 0.9 > generated variant 0.7. Immutable after build;
rebuilds swap in a fresh instance.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..kb.store import KnowledgeBase
from .folding import fold_tokens
from .variants import generate_name_variants

CANONICAL_WEIGHT = 1.0
ALIAS_WEIGHT = 0.9
GENERATED_WEIGHT = 0.7

_KIND_WEIGHTS = {"canonical": CANONICAL_WEIGHT, "alias": ALIAS_WEIGHT, "generated": GENERATED_WEIGHT}


@dataclass(frozen=True)
class GazetteerEntry:
    entity_id: str
    variant_kind: str  # canonical | alias | generated
    weight: float
    acronym: bool = False  # short all-caps surfaces match case-sensitively


def _is_acronym(surface: str) -> bool:
    return surface.isupper() and surface.isalpha() and len(surface) <= 5


@dataclass
class Gazetteer:
    entries: dict[tuple[str, ...], list[GazetteerEntry]] = field(default_factory=dict)
    _max_len_by_first: dict[str, int] = field(default_factory=dict)

    def add(self, surface: str, entity_id: str, variant_kind: str, weight: float | None = None) -> None:
        key = fold_tokens(surface)
        if not key:
            return
        if weight is None:
            weight = _KIND_WEIGHTS[variant_kind]
        acronym = _is_acronym(surface)
        bucket = self.entries.setdefault(key, [])
        for i, existing in enumerate(bucket):
            if existing.entity_id == entity_id:
                if weight > existing.weight:
                    bucket[i] = GazetteerEntry(entity_id, variant_kind, weight, acronym)
                elif not acronym and existing.acronym:
                    # a non-acronym surface for the same key lifts the case restriction
                    bucket[i] = GazetteerEntry(
                        entity_id, existing.variant_kind, existing.weight, False
                    )
                return
        bucket.append(GazetteerEntry(entity_id, variant_kind, weight, acronym))
        first = key[0]
        if len(key) > self._max_len_by_first.get(first, 0):
            self._max_len_by_first[first] = len(key)

    def candidates(self, key: tuple[str, ...]) -> list[GazetteerEntry]:
        return self.entries.get(key, [])

    def max_key_length(self, first_token: str) -> int:
        return self._max_len_by_first.get(first_token, 0)

    def surface_count(self) -> int:
        return len(self.entries)

    def __contains__(self, surface: str) -> bool:
        return fold_tokens(surface) in self.entries


def build_gazetteer(
    kb: KnowledgeBase,
    include_persons: bool = True,
    weights: dict[str, float] | None = None,
) -> Gazetteer:
    """Index every canonical name, alias and generated variant in the KB."""
    w = dict(_KIND_WEIGHTS)
    if weights:
        w.update(weights)
    gaz = Gazetteer()
    for company in kb.companies():
        named = {company.canonical_name} | set(company.aliases)
        gaz.add(company.canonical_name, company.id, "canonical", w["canonical"])
        for alias in company.aliases:
            gaz.add(alias, company.id, "alias", w["alias"])
        for source_name in sorted(named):
            for variant in generate_name_variants(source_name, "company"):
                if variant not in named:
                    gaz.add(variant, company.id, "generated", w["generated"])
    if include_persons:
        for person in kb.persons():
            gaz.add(person.full_name, person.id, "canonical", w["canonical"])
            for variant in generate_name_variants(person.full_name, "person"):
                if variant != person.full_name:
                    gaz.add(variant, person.id, "generated", w["generated"])
    return gaz
