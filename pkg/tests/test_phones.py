from __future__ import annotations

import pytest

from trialkb.extract.phones import PhoneError, bundled_rules, normalize_phone

# (raw, country hint, expected E.164 or None when the rule must reject)
GOLD_CASES = [
    # CH: +41, trunk 0, national length 9
    ("+41 81 286 24 24", None, "+41812862424"),
    ("081 286 24 24", "CH", "+41812862424"),
    ("0041 81 286 24 24", None, "+41812862424"),
    ("+41 (0)81 286 24 24", None, "+41812862424"),
    ("081 286 24", "CH", None),
    # DE: +49, trunk 0, national length 10-11
    ("+49 89 1234 5678", None, "+498912345678"),
    ("089 1234 5678", "DE", "+498912345678"),
    ("0151 2345 6789", "DE", "+4915123456789"),
    ("0049 89 1234 5678", None, "+498912345678"),
    ("089 1234", "DE", None),
    # AT: +43, trunk 0, national length 9-11
    ("+43 316 825111", None, "+43316825111"),
    ("0316 825111", "AT", "+43316825111"),
    ("0664 123 4567", "AT", "+436641234567"),
    ("0043 316 825111", None, "+43316825111"),
    ("0316 8251", "AT", None),
    # FR: +33, trunk 0, national length 9
    ("+33 1 42 86 83 00", None, "+33142868300"),
    ("01 42 86 83 00", "FR", "+33142868300"),
    ("0033 1 42 86 83 00", None, "+33142868300"),
    ("+33 (0)1 42 86 83 00", None, "+33142868300"),
    ("01 42 86 83", "FR", None),
    # GB: +44, trunk 0, national length 9-10
    ("+44 20 7946 0958", None, "+442079460958"),
    ("020 7946 0958", "GB", "+442079460958"),
    ("0044 20 7946 0958", None, "+442079460958"),
    ("0169 772 345", "GB", "+44169772345"),
    ("020 7946 09581", "GB", None),
    # US: +1, trunk 1, national length 10
    ("+1 (617) 555-0142", None, "+16175550142"),
    ("617-555-0142", "US", "+16175550142"),
    ("1 800 555 0199", "US", "+18005550199"),
    ("001 617 555 0142", None, "+16175550142"),
    ("555-0142", "US", None),
]


class TestGoldSet:
    @pytest.mark.parametrize("raw,hint,expected", GOLD_CASES)
    def test_case(self, raw, hint, expected):
        if expected is None:
            with pytest.raises(PhoneError) as err:
                normalize_phone(raw, hint)
            assert "length" in str(err.value)
        else:
            assert normalize_phone(raw, hint) == expected

    def test_gold_set_has_thirty_cases(self):
        assert len(GOLD_CASES) == 30

    @pytest.mark.parametrize("raw,hint,expected", [c for c in GOLD_CASES if c[2]])
    def test_round_trip(self, raw, hint, expected):
        # the E.164 output re-validates under the same rule set
        assert normalize_phone(expected) == expected


class TestErrors:
    def test_too_short_is_length_error(self):
        with pytest.raises(PhoneError) as err:
            normalize_phone("12345", "CH")
        assert "length" in str(err.value)

    def test_country_indeterminate_without_hint_or_prefix(self):
        with pytest.raises(PhoneError) as err:
            normalize_phone("81 286 24 24")
        assert "country indeterminate" in str(err.value)

    def test_unknown_hint_country(self):
        with pytest.raises(PhoneError):
            normalize_phone("12 345 6789", "ZZ")

    def test_unknown_calling_code(self):
        with pytest.raises(PhoneError):
            normalize_phone("+999 1234567")

    def test_letters_rejected(self):
        with pytest.raises(PhoneError):
            normalize_phone("call 081 286 x4 24", "CH")

    def test_length_error_names_the_rule(self):
        with pytest.raises(PhoneError) as err:
            normalize_phone("081 286 24 2", "CH")
        assert "CH rule" in str(err.value)


class TestRuleSet:
    def test_bundled_countries(self):
        rules = bundled_rules()
        assert {"CH", "DE", "AT", "FR", "GB", "US"} <= set(rules.by_country)

    def test_calling_codes_one_to_three_digits(self):
        from trialkb.extract.phones import CountryPhoneRule

        with pytest.raises(ValueError):
            CountryPhoneRule(country="XX", calling_code="1234", trunk_prefix=None,
                             national_lengths=frozenset([9]))
        with pytest.raises(ValueError):
            CountryPhoneRule(country="XX", calling_code="41", trunk_prefix=None,
                             national_lengths=frozenset())
