"""Precision/recall harness for linking and slot filling against gold labels.

Gold mention labels are TSV lines: doc_id <TAB> start <TAB> end <TAB> entity_id
(entity_id "NIL" marks mentions that must not be linked). Gold slot triples
are TSV lines: subject <TAB> role <TAB> object.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .linking import LinkedMention
from .slots import SlotAssignment

NIL_LABEL = "NIL"


@dataclass(frozen=True)
class LinkingScores:
    precision: float
    recall: float
    predicted: int
    gold: int
    correct: int


@dataclass(frozen=True)
class SlotScores:
    precision: float
    recall: float
    f1: float
    predicted: int
    gold: int
    correct: int


def load_gold_mentions(path: str | Path) -> dict[str, dict[tuple[int, int], str]]:
    gold: dict[str, dict[tuple[int, int], str]] = {}
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            doc_id, start, end, entity_id = line.split("\t")
            gold.setdefault(doc_id, {})[(int(start), int(end))] = entity_id
    return gold


def load_gold_slots(path: str | Path) -> set[tuple[str, str, str]]:
    triples = set()
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            subject, role, obj = line.split("\t")
            triples.add((subject, role, obj))
    return triples


def score_linking(
    predictions: dict[str, list[LinkedMention]],
    gold: dict[str, dict[tuple[int, int], str]],
) -> LinkingScores:
    """Span-and-id exact match. NIL gold rows count against precision when
    linked, but are excluded from the recall denominator."""
    predicted = 0
    correct = 0
    for doc_id, mentions in predictions.items():
        doc_gold = gold.get(doc_id, {})
        for mention in mentions:
            if mention.resolved is None:
                continue
            predicted += 1
            if doc_gold.get(mention.span) == mention.resolved:
                correct += 1
    linkable = sum(1 for doc in gold.values() for label in doc.values() if label != NIL_LABEL)
    precision = correct / predicted if predicted else 0.0
    recall = correct / linkable if linkable else 0.0
    return LinkingScores(precision, recall, predicted, linkable, correct)


def score_slots(
    predictions: list[SlotAssignment],
    gold: set[tuple[str, str, str]],
) -> SlotScores:
    predicted_triples = {a.triple() for a in predictions}
    correct = len(predicted_triples & gold)
    precision = correct / len(predicted_triples) if predicted_triples else 0.0
    recall = correct / len(gold) if gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return SlotScores(precision, recall, f1, len(predicted_triples), len(gold), correct)
