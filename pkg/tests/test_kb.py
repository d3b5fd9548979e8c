from __future__ import annotations

import json
from datetime import date

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trialkb.kb import (
    ClinicalTrialRecord,
    CompanyEntity,
    KnowledgeBase,
    PersonEntity,
    Phase,
    TrialStatus,
    UnknownFieldError,
    ValidationError,
    compute_stats,
)


def company(i: int, **kwargs) -> CompanyEntity:
    defaults = dict(id=f"c-{i:03d}", canonical_name=f"Company {i:03d} AG", country="CH")
    defaults.update(kwargs)
    return CompanyEntity(**defaults)


def trial(i: int, **kwargs) -> ClinicalTrialRecord:
    defaults = dict(registry_id=f"NCT{i:08d}", source="unit", title=f"Study {i}")
    defaults.update(kwargs)
    return ClinicalTrialRecord(**defaults)


class TestUpsert:
    def test_new_company_gets_fresh_id_and_grows_kb(self):
        kb = KnowledgeBase()
        new_id = kb.upsert(CompanyEntity(id="", canonical_name="Novagenix AG"))
        assert new_id
        assert len(kb) == 1
        assert kb.get(new_id).canonical_name == "Novagenix AG"

    def test_same_trial_identity_replaces_instead_of_duplicating(self):
        kb = KnowledgeBase()
        kb.upsert(trial(1, status=TrialStatus.RECRUITING))
        kb.upsert(trial(1, status=TrialStatus.COMPLETED))
        assert len(kb) == 1
        assert kb.trials()[0].status is TrialStatus.COMPLETED

    def test_invalid_phone_names_the_field(self):
        kb = KnowledgeBase()
        with pytest.raises(ValidationError) as err:
            kb.upsert(company(1, phones=("abc",)))
        assert err.value.field == "phones"

    def test_same_registry_id_from_other_source_is_distinct(self):
        kb = KnowledgeBase()
        kb.upsert(trial(1, source="alpha"))
        kb.upsert(trial(1, source="beta"))
        assert len(kb) == 2

    def test_empty_alias_rejected(self):
        with pytest.raises(ValidationError):
            kb = KnowledgeBase()
            kb.upsert(company(1, aliases=frozenset([""])))

    def test_dangling_sponsor_link_rejected(self):
        kb = KnowledgeBase()
        with pytest.raises(ValidationError) as err:
            kb.upsert(trial(1, sponsor_links=frozenset(["c-404"])))
        assert err.value.field == "sponsor_links"

    def test_dangling_affiliation_rejected(self):
        kb = KnowledgeBase()
        with pytest.raises(ValidationError):
            kb.upsert(PersonEntity(id="p-1", full_name="A B", affiliations=(("c-404", "ceo", "x"),)))

    def test_upsert_idempotence_on_disk(self, tmp_path):
        kb = KnowledgeBase(tmp_path / "kb")
        entity = company(1, aliases=frozenset(["C1"]), phones=("+41812862424",))
        kb.upsert(entity)
        kb.save()
        first = (tmp_path / "kb" / "companies.jsonl").read_bytes()
        kb.upsert(entity)
        kb.save()
        second = (tmp_path / "kb" / "companies.jsonl").read_bytes()
        assert first == second


class TestQuery:
    def test_status_filter(self):
        kb = KnowledgeBase()
        kb.upsert(trial(1, status=TrialStatus.COMPLETED))
        kb.upsert(trial(2, status=TrialStatus.RECRUITING))
        kb.upsert(trial(3, status=TrialStatus.TERMINATED))
        found = kb.query("trial", status="completed")
        assert len(found) == 1
        assert found[0].registry_id == "NCT00000001"

    def test_empty_filter_returns_everything_in_id_order(self):
        kb = KnowledgeBase()
        for i in (3, 1, 2):
            kb.upsert(company(i))
        assert [c.id for c in kb.query("company")] == ["c-001", "c-002", "c-003"]

    def test_unknown_field_raises(self):
        kb = KnowledgeBase()
        with pytest.raises(UnknownFieldError):
            kb.query("company", favourite_colour="blue")

    def test_country_filter_matches_linear_scan_oracle(self):
        kb = KnowledgeBase()
        countries = ["CH", "DE", "US", "CH", "FR"] * 4
        for i, country in enumerate(countries):
            kb.upsert(company(i, country=country))
        expected = {c.id for c in kb.companies() if c.country == "CH"}
        assert {c.id for c in kb.query("company", country="CH")} == expected
        assert len(expected) == 8


class TestStats:
    def test_empty_kb_all_zero(self):
        report = compute_stats(KnowledgeBase())
        assert report.total_trials == 0
        assert report.completed_fraction == 0.0

    def test_small_fixture_matches_hand_count(self):
        # 12 trials: 5 completed, 7 linked to the single company
        kb = KnowledgeBase()
        kb.upsert(company(1))
        for i in range(12):
            status = TrialStatus.COMPLETED if i < 5 else TrialStatus.ACTIVE
            links = frozenset(["c-001"]) if i < 7 else frozenset()
            kb.upsert(trial(i, status=status, sponsor_links=links))
        report = compute_stats(kb)
        assert report.total_trials == 12
        assert report.completed_trials == 5
        assert report.linked_trials == 7
        assert report.completed_fraction == pytest.approx(5 / 12)
        assert report.distinct_companies == 1

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(
            st.tuples(
                st.integers(min_value=0, max_value=30),
                st.sampled_from(list(TrialStatus)),
                st.booleans(),
            ),
            max_size=40,
        )
    )
    def test_stats_equal_brute_force_recount_after_random_upserts(self, ops):
        kb = KnowledgeBase()
        kb.upsert(company(1))
        for trial_no, status, linked in ops:
            links = frozenset(["c-001"]) if linked else frozenset()
            kb.upsert(trial(trial_no, status=status, sponsor_links=links))
        report = compute_stats(kb)
        trials = kb.trials()
        assert report.total_trials == len(trials)
        assert report.completed_trials == sum(
            1 for t in trials if t.status is TrialStatus.COMPLETED
        )
        assert report.linked_trials == sum(1 for t in trials if t.sponsor_links)
        if trials:
            assert report.completed_fraction == report.completed_trials / report.total_trials
        else:
            assert report.completed_fraction == 0.0


class TestPersistence:
    def test_save_load_round_trip(self, tmp_path):
        kb = KnowledgeBase(tmp_path / "kb")
        kb.upsert(company(1, domain_tags=frozenset(["biotech"])))
        kb.upsert(PersonEntity(id="p-1", full_name="Jane Roe", affiliations=(("c-001", "ceo", "seed"),)))
        kb.upsert(trial(1, phase=Phase.PHASE_2, last_update=date(2024, 1, 2), sponsor_links=frozenset(["c-001"])))
        kb.save()
        reloaded = KnowledgeBase.load(tmp_path / "kb")
        assert [c.to_dict() for c in reloaded.companies()] == [c.to_dict() for c in kb.companies()]
        assert [p.to_dict() for p in reloaded.persons()] == [p.to_dict() for p in kb.persons()]
        assert [t.to_dict() for t in reloaded.trials()] == [t.to_dict() for t in kb.trials()]

    def test_audit_log_is_hash_chained_and_tamper_evident(self, tmp_path):
        kb = KnowledgeBase(tmp_path / "kb")
        kb.upsert(company(1))
        kb.upsert(company(2))
        kb.save()
        assert kb.verify_audit_chain()
        lines = (tmp_path / "kb" / "audit.jsonl").read_text().splitlines()
        assert len(lines) == 2
        tampered = json.loads(lines[0])
        tampered["details"]["entity_id"] = "c-999"
        evil = KnowledgeBase.load(tmp_path / "kb")
        evil._audit[0] = tampered
        assert not evil.verify_audit_chain()

    def test_one_json_object_per_line_with_snake_case_fields(self, tmp_path):
        kb = KnowledgeBase(tmp_path / "kb")
        kb.upsert(company(1))
        kb.save()
        row = json.loads((tmp_path / "kb" / "companies.jsonl").read_text().splitlines()[0])
        assert {"id", "canonical_name", "aliases", "country", "website",
                "personnel", "phones", "last_harvested", "domain_tags"} == set(row)
