"""Payload history: supersede vs log replay, time cuts, canonical order."""

from datetime import timedelta

from cockpit.catena import Payload, ProjectDataStore
from cockpit.catena.types import DataTypeDef, FieldDef
from cockpit.interchange import parse_timestamp

SNAPSHOT = DataTypeDef(id="dt-snap", kind="table", schema=[FieldDef("v", "count")])
LOG = DataTypeDef(id="dt-log", kind="effort-log", schema=[
    FieldDef("person-id", "identifier"), FieldDef("activity-id", "identifier"),
    FieldDef("date", "timestamp"), FieldDef("hours", "duration-hours")])

T0 = parse_timestamp("2026-01-05")


def _rec(person: str, hours: float) -> dict:
    return {"person-id": person, "activity-id": "a1",
            "date": "2026-01-09T00:00:00Z", "hours": hours}


def test_snapshot_latest_wins():
    store = ProjectDataStore()
    store.add("e", T0, [{"v": 1}])
    store.add("e", T0 + timedelta(days=7), [{"v": 2}])
    assert store.effective_records("e", SNAPSHOT) == [{"v": 2}]
    assert store.effective_records("e", SNAPSHOT, T0) == [{"v": 1}]


def test_missing_entry_is_none_not_empty():
    store = ProjectDataStore()
    assert store.effective_records("e", SNAPSHOT) is None
    store.add("e", T0, [])
    assert store.effective_records("e", SNAPSHOT) == []


def test_log_accumulates_and_replays_remove_change():
    store = ProjectDataStore()
    store.add("e", T0, [_rec("p1", 3.0), _rec("p2", 4.0)])
    store.add("e", T0 + timedelta(days=1), [_rec("p3", 5.0)])
    assert len(store.effective_records("e", LOG)) == 3
    store.add("e", T0 + timedelta(days=2), [{"person-id": "p2"}], action="remove")
    records = store.effective_records("e", LOG)
    assert [r["person-id"] for r in records] == ["p1", "p3"]
    store.add("e", T0 + timedelta(days=3),
              [{"old": _rec("p1", 3.0), "new": _rec("p1", 6.0)}], action="change")
    records = store.effective_records("e", LOG)
    assert sorted((r["person-id"], r["hours"]) for r in records) == [("p1", 6.0), ("p3", 5.0)]


def test_time_cut_excludes_future_payloads():
    store = ProjectDataStore()
    store.add("e", T0, [_rec("p1", 1.0)])
    store.add("e", T0 + timedelta(days=10), [_rec("p2", 2.0)])
    cut = store.effective_records("e", LOG, T0 + timedelta(days=5))
    assert [r["person-id"] for r in cut] == ["p1"]


def test_versions_expose_history():
    store = ProjectDataStore()
    store.add("e", T0, [{"v": 1}])
    store.add("e", T0 + timedelta(days=7), [{"v": 2}])
    versions = store.versions("e", data_type=SNAPSHOT)
    assert [records for _, records in versions] == [[{"v": 1}], [{"v": 2}]]
    log_versions = store.versions("e", data_type=LOG)
    assert [len(records) for _, records in log_versions] == [1, 2]


def test_effective_content_is_insertion_order_free():
    a = ProjectDataStore()
    b = ProjectDataStore()
    p1 = Payload("e", T0, [_rec("p1", 1.0)])
    p2 = Payload("e", T0, [_rec("p2", 2.0)])
    a.append(p1), a.append(p2)
    b.append(p2), b.append(p1)
    assert a.effective_records("e", LOG) == b.effective_records("e", LOG)
    assert a.fingerprint() == b.fingerprint()


def test_store_document_round_trip():
    store = ProjectDataStore()
    store.add("e", T0, [_rec("p1", 1.0)], source="form:wfi-x")
    store.add("f", T0, [{"v": 1}], source="dao:pkg")
    doc = store.to_dict()
    again = ProjectDataStore.from_dict(doc)
    assert again.to_dict() == doc
