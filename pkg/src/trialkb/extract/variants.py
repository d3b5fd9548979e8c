"""Name-variant generation for companies and persons.

Companies get suffix-stripped and initialism forms; persons get both
name orderings. Everything also appears in a case/diacritic-folded form.
"""
from __future__ import annotations

from .folding import fold

COMPANY_LEGAL_SUFFIXES = {
    "ag", "gmbh", "inc", "inc.", "ltd", "ltd.", "sa", "nv", "plc",
    "corp", "corp.", "llc", "co.", "s.p.a.",
}

MIN_VARIANT_LENGTH = 3


def strip_legal_suffix(name: str) -> str:
    """Drop trailing legal-form tokens (AG, GmbH, Inc., ...)."""
    tokens = name.split()
    while len(tokens) > 1 and tokens[-1].lower() in COMPANY_LEGAL_SUFFIXES:
        tokens = tokens[:-1]
    return " ".join(tokens)


def initialism(name: str) -> str | None:
    """Initial letters of a multi-token name, e.g. 'Swiss Biotech Partners' -> 'SBP'."""
    tokens = [t for t in name.split() if t]
    if len(tokens) < 2:
        return None
    return "".join(t[0].upper() for t in tokens)


def _person_orderings(name: str) -> set[str]:
    if "," in name:
        family, _, given = name.partition(",")
        family, given = family.strip(), given.strip()
        if family and given:
            return {f"{given} {family}", f"{family}, {given}"}
        return {name}
    tokens = name.split()
    if len(tokens) < 2:
        return {name}
    given, family = " ".join(tokens[:-1]), tokens[-1]
    return {name, f"{family}, {given}"}


def generate_name_variants(name: str, kind: str) -> set[str]:
    """All surface forms for one entity name.

    `kind` is "company" or "person". Always includes the original and its
    folded form; variants shorter than 3 characters are dropped unless
    they are initialisms.
    """
    if not name:
        raise ValueError("name must be non-empty")
    variants = {name, fold(name)}
    initialisms: set[str] = set()
    if kind == "company":
        stripped = strip_legal_suffix(name)
        if stripped and stripped != name:
            variants.add(stripped)
        abbrev = initialism(stripped)
        if abbrev:
            initialisms.add(abbrev)
            variants.add(abbrev)
    elif kind == "person":
        variants.update(_person_orderings(name))
    else:
        raise ValueError(f"unknown entity kind: {kind!r}")
    return {
        v for v in variants
        if v and (len(v) >= MIN_VARIANT_LENGTH or v in initialisms or v == name)
    }
