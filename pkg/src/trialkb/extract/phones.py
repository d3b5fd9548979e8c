"""Phone normalization to E.164 using per-country composition rules.

A number is accepted only when its national part matches the length set
of the country rule resolved from an explicit international prefix
("+CC" or "00CC") or from the caller's country hint.

Rule file: data/phone_rules.json, a JSON list of objects
{country, calling_code, trunk_prefix, national_lengths}; more countries
can be appended through PhoneRuleSet.add at config time.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

FORMATTING_CHARS = set(" -/.() ")


class PhoneError(ValueError):
    """Phone string rejected; the message names the violated rule."""


@dataclass(frozen=True)
class CountryPhoneRule:
    country: str
    calling_code: str
    trunk_prefix: str | None
    national_lengths: frozenset[int]

    def __post_init__(self):
        if not (1 <= len(self.calling_code) <= 3) or not self.calling_code.isdigit():
            raise ValueError(f"calling code must be 1-3 digits: {self.calling_code!r}")
        if not self.national_lengths:
            raise ValueError(f"national_lengths empty for {self.country}")

    def describe(self) -> str:
        return f"{self.country} rule (+{self.calling_code}, national lengths {sorted(self.national_lengths)})"


class PhoneRuleSet:
    def __init__(self, rules: list[CountryPhoneRule]):
        self.by_country = {r.country: r for r in rules}
        # longest calling code wins when prefixes nest (e.g. +1 vs +41 is fine,
        # but +4 does not exist; ordering guards config extensions)
        self._by_code = sorted(rules, key=lambda r: -len(r.calling_code))

    def for_country(self, country: str) -> CountryPhoneRule | None:
        return self.by_country.get(country.upper())

    def match_calling_code(self, digits: str) -> CountryPhoneRule | None:
        for rule in self._by_code:
            if digits.startswith(rule.calling_code):
                return rule
        return None

    def add(self, rule: CountryPhoneRule) -> None:
        self.by_country[rule.country] = rule
        self._by_code.append(rule)
        self._by_code.sort(key=lambda r: -len(r.calling_code))


def _rule_from_dict(raw: dict) -> CountryPhoneRule:
    return CountryPhoneRule(
        country=raw["country"].upper(),
        calling_code=str(raw["calling_code"]),
        trunk_prefix=str(raw["trunk_prefix"]) if raw.get("trunk_prefix") else None,
        national_lengths=frozenset(int(n) for n in raw["national_lengths"]),
    )


_BUNDLED: PhoneRuleSet | None = None


def bundled_rules() -> PhoneRuleSet:
    global _BUNDLED
    if _BUNDLED is None:
        raw = resources.files("trialkb.extract").joinpath("data/phone_rules.json").read_text("utf-8")
        _BUNDLED = PhoneRuleSet([_rule_from_dict(r) for r in json.loads(raw)])
    return _BUNDLED


def _strip_formatting(text: str) -> str:
    digits = []
    for ch in text:
        if ch.isdigit():
            digits.append(ch)
        elif ch not in FORMATTING_CHARS:
            raise PhoneError(f"invalid character {ch!r} in phone number")
    return "".join(digits)


def normalize_phone(
    raw: str,
    country_hint: str | None = None,
    rules: PhoneRuleSet | None = None,
) -> str:
    """Normalize `raw` to "+<digits>" E.164 form or raise PhoneError."""
    rules = rules or bundled_rules()
    text = raw.strip().replace("(0)", "")  # "+41 (0)81 ..." writing style

    international = False
    if text.startswith("+"):
        international = True
        text = text[1:]
    digits = _strip_formatting(text)
    if not international and digits.startswith("00") and len(digits) > 2:
        international = True
        digits = digits[2:]

    if len(digits) < 7:
        raise PhoneError(
            f"length: only {len(digits)} digits after stripping formatting (minimum 7)"
        )

    if international:
        rule = rules.match_calling_code(digits)
        if rule is None:
            raise PhoneError(f"no country rule matches international prefix of {digits[:3]}...")
        national = digits[len(rule.calling_code):]
    else:
        if not country_hint:
            raise PhoneError("country indeterminate")
        rule = rules.for_country(country_hint)
        if rule is None:
            raise PhoneError(f"country indeterminate: no rule configured for {country_hint!r}")
        national = digits
        if rule.trunk_prefix and national.startswith(rule.trunk_prefix):
            national = national[len(rule.trunk_prefix):]

    if len(national) not in rule.national_lengths:
        raise PhoneError(f"length: national number has {len(national)} digits, violates {rule.describe()}")
    return f"+{rule.calling_code}{national}"
