from __future__ import annotations

import threading

import pytest
from fastapi.testclient import TestClient

from trialkb.config import ConfigError, PipelineConfig
from trialkb.extract.slots import SlotAssignment, SlotRole
from trialkb.fuse import EventStore, propose_changes
from trialkb.kb import CompanyEntity, KnowledgeBase, PersonEntity
from trialkb.service.app import create_app

TOKENS = {"secret-token": "alice", "other-token": "bob"}


def phone_slot(number, company="c-1"):
    return SlotAssignment(subject=company, role=SlotRole.IS_PHONE_NUMBER_OF, object=number,
                          confidence=0.9, evidence_url="https://e.com/contact",
                          evidence_span=(0, 10), evidence_excerpt=f"Call {number}")


@pytest.fixture()
def service():
    kb = KnowledgeBase()
    kb.upsert(CompanyEntity(id="c-1", canonical_name="Novagenix AG", country="CH"))
    kb.upsert(PersonEntity(id="p-1", full_name="Alice Keller"))
    events = EventStore()
    created = propose_changes(
        [phone_slot(f"+4181286242{i}") for i in range(4)], kb, events
    )
    from trialkb.fuse.engine import apply_change

    apply_change(created[3].event_id, "reject", "bob", kb, events)
    app = create_app(kb, events, TOKENS)
    return TestClient(app), kb, events


AUTH = {"Authorization": "Bearer secret-token"}


class TestEndpoints:
    def test_health(self, service):
        client, _, _ = service
        assert client.get("/health").status_code == 200

    def test_list_pending_oldest_first(self, service):
        client, _, _ = service
        body = client.get("/changes", params={"status": "pending"}).json()
        assert [e["event_id"] for e in body["events"]] == ["ev-000001", "ev-000002", "ev-000003"]
        assert body["counts"] == {"pending": 3, "accepted": 0, "rejected": 1}

    def test_paging_with_cursor(self, service):
        client, _, _ = service
        first = client.get("/changes", params={"status": "pending", "limit": 2}).json()
        assert len(first["events"]) == 2
        assert first["cursor"] == "ev-000002"
        second = client.get(
            "/changes", params={"status": "pending", "limit": 2, "cursor": first["cursor"]}
        ).json()
        assert [e["event_id"] for e in second["events"]] == ["ev-000003"]
        assert second["cursor"] is None

    def test_filter_matches_brute_force_oracle(self):
        kb = KnowledgeBase()
        kb.upsert(CompanyEntity(id="c-1", canonical_name="Novagenix AG"))
        events = EventStore()
        created = propose_changes([phone_slot(f"+41812862{i:03d}") for i in range(100)], kb, events)
        from trialkb.fuse.engine import apply_change

        for i, event in enumerate(created):
            if i % 3 == 0:
                apply_change(event.event_id, "accept" if i % 2 else "reject", "alice", kb, events)
        client = TestClient(create_app(kb, events, TOKENS))
        for status in ("pending", "accepted", "rejected"):
            got = client.get("/changes", params={"status": status, "limit": 500}).json()
            expected = [e.event_id for e in events.all() if e.status.value == status]
            assert [e["event_id"] for e in got["events"]] == expected

    def test_bad_cursor_and_bad_limit_rejected(self, service):
        client, _, _ = service
        assert client.get("/changes", params={"cursor": "nope"}).status_code == 400
        assert client.get("/changes", params={"limit": 0}).status_code == 400
        assert client.get("/changes", params={"limit": 501}).status_code == 400
        assert client.get("/changes", params={"status": "weird"}).status_code == 400

    def test_get_single_change(self, service):
        client, _, _ = service
        assert client.get("/changes/ev-000001").json()["entity_id"] == "c-1"
        assert client.get("/changes/ev-404").status_code == 404

    def test_decide_accept(self, service):
        client, kb, _ = service
        response = client.post("/changes/ev-000001/decision", json={"decision": "accept"},
                               headers=AUTH)
        assert response.status_code == 200
        assert response.json()["status"] == "accepted"
        assert response.json()["decided_by"] == "alice"
        assert "+41812862420" in kb.get("c-1").phones

    def test_decide_twice_idempotent(self, service):
        client, _, _ = service
        first = client.post("/changes/ev-000001/decision", json={"decision": "accept"}, headers=AUTH)
        second = client.post("/changes/ev-000001/decision", json={"decision": "accept"}, headers=AUTH)
        assert first.status_code == second.status_code == 200
        assert first.json() == second.json()

    def test_missing_or_bad_token_is_401_and_untouched(self, service):
        client, _, events = service
        assert client.post("/changes/ev-000001/decision", json={"decision": "accept"}).status_code == 401
        bad = {"Authorization": "Bearer wrong"}
        assert client.post("/changes/ev-000001/decision", json={"decision": "accept"},
                           headers=bad).status_code == 401
        assert events.get("ev-000001").status.value == "pending"

    def test_unknown_event_404_bad_decision_400(self, service):
        client, _, _ = service
        assert client.post("/changes/ev-999/decision", json={"decision": "accept"},
                           headers=AUTH).status_code == 404
        assert client.post("/changes/ev-000001/decision", json={"decision": "maybe"},
                           headers=AUTH).status_code == 400

    def test_entity_lookup(self, service):
        client, _, _ = service
        assert client.get("/entities/c-1").json()["canonical_name"] == "Novagenix AG"
        assert client.get("/entities/p-1").json()["full_name"] == "Alice Keller"
        assert client.get("/entities/zzz").status_code == 404

    def test_stats_endpoint(self, service):
        client, _, _ = service
        body = client.get("/stats").json()
        assert body["distinct_companies"] == 1
        assert body["total_trials"] == 0

    def test_audit_trail_paged_by_seq(self, service):
        client, _, _ = service
        client.post("/changes/ev-000001/decision", json={"decision": "accept"}, headers=AUTH)
        first = client.get("/audit").json()
        assert first["entries"]
        cursor = first["cursor"]
        again = client.get("/audit", params={"cursor": cursor}).json()
        assert again["entries"] == []
        assert client.get("/audit", params={"cursor": "xyz"}).status_code == 400

    def test_audit_entries_carry_reviewer_and_hash_chain(self, service):
        client, kb, _ = service
        client.post("/changes/ev-000002/decision", json={"decision": "accept"}, headers=AUTH)
        entries = kb.audit_entries()
        decision_rows = [e for e in entries if e["action"] == "change_accepted"]
        assert decision_rows and decision_rows[-1]["actor"] == "alice"
        assert kb.verify_audit_chain()


class TestConcurrency:
    def test_concurrent_accept_and_list_never_partial(self, service):
        client, _, _ = service
        barrier = threading.Barrier(2)
        listed: list[dict] = []

        def do_accept():
            barrier.wait()
            client.post("/changes/ev-000001/decision", json={"decision": "accept"}, headers=AUTH)

        def do_list():
            barrier.wait()
            listed.append(client.get("/changes", params={"limit": 500}).json())

        threads = [threading.Thread(target=do_accept), threading.Thread(target=do_list)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

        statuses = {e["event_id"]: e["status"] for e in listed[0]["events"]}
        counts = listed[0]["counts"]
        # either fully pre-accept or fully post-accept
        assert statuses["ev-000001"] in ("pending", "accepted")
        expected_pending = 3 if statuses["ev-000001"] == "pending" else 2
        assert counts["pending"] == expected_pending

    def test_parallel_decisions_on_same_event_settle_once(self, service):
        client, kb, _ = service
        barrier = threading.Barrier(4)
        results = []

        def decide(decision):
            barrier.wait()
            response = client.post("/changes/ev-000003/decision",
                                   json={"decision": decision}, headers=AUTH)
            results.append(response.json()["status"])

        threads = [threading.Thread(target=decide, args=(d,))
                   for d in ("accept", "reject", "accept", "reject")]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(set(results)) == 1  # one outcome, everyone sees it


class TestStartupValidation:
    def test_missing_state_path_named_in_error(self, tmp_path):
        with pytest.raises(ConfigError) as err:
            PipelineConfig.from_dict(
                {"state_dir": str(tmp_path / "missing" / "state")}, base=tmp_path
            )
        assert "missing" in str(err.value)

    def test_missing_adapters_file_named(self, tmp_path):
        with pytest.raises(ConfigError) as err:
            PipelineConfig.from_dict(
                {"state_dir": str(tmp_path / "state"), "adapters_path": str(tmp_path / "nope.json")},
                base=tmp_path,
            )
        assert "nope.json" in str(err.value)
