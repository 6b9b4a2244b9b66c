"""Scripted and randomized cluster simulation."""

import json

import pytest

from rgc.codec import MessageVector
from rgc.storesim import (Cluster, Scenario, ScenarioEvent,
                          random_failure_soak, run_scenario)


def _msg(spec, seed=0):
    return MessageVector.random(spec.field.q, spec.params.M, seed=seed)


def test_event_validation():
    ScenarioEvent(kind="fail", node=3)
    ScenarioEvent(kind="read", disks=(1, 2, 3))
    ScenarioEvent(kind="assert", predicate="durable")
    with pytest.raises(ValueError):
        ScenarioEvent(kind="fail")                       # node missing
    with pytest.raises(ValueError):
        ScenarioEvent(kind="assert", predicate="happy")  # unknown check
    with pytest.raises(ValueError):
        ScenarioEvent(kind="reboot", node=1)             # unknown kind


def test_scenario_json_round_trip():
    text = json.dumps({"events": [
        {"fail": 2}, {"repair": 2}, {"read": [1, 2, 3, 4, 5, 6, 7]},
        {"assert": "intact"}]})
    scen = Scenario.from_json(text)
    assert len(scen.events) == 4
    assert Scenario.from_json(scen.to_json()) == scen
    with pytest.raises(ValueError):
        Scenario.from_json('{"events": [{"fail": 1, "repair": 2}]}')
    with pytest.raises(ValueError):
        Scenario.from_json('{"steps": []}')


def test_fail_repair_read_cycle(golden_spec):
    cluster = Cluster.provision(golden_spec, _msg(golden_spec))
    assert cluster.live() == tuple(range(1, 10))
    ev = cluster.fail(4)
    assert ev["ok"] and ev["durable"]
    ev = cluster.repair(4)
    assert ev["ok"] and ev["transferred"] == 8 and ev["exact"]
    ev = cluster.read([1, 2, 3, 4, 5, 6, 7])
    assert ev["ok"] and ev["message"] == list(_msg(golden_spec).values)
    assert cluster.intact() and cluster.ledger_balanced()


def test_read_of_failed_disk_is_flagged_not_raised(golden_spec):
    cluster = Cluster.provision(golden_spec, _msg(golden_spec))
    cluster.fail(3)
    ev = cluster.read([1, 2, 3, 4, 5, 6, 7])
    assert not ev["ok"]
    assert "durability violation" in ev["error"]
    assert cluster.durable()           # 1 failure is still within budget
    report = cluster.report()
    assert not report.all_ok


def test_repair_preconditions_recorded(golden_spec):
    cluster = Cluster.provision(golden_spec, _msg(golden_spec))
    ev = cluster.repair(5)
    assert not ev["ok"] and "live" in ev["error"]
    cluster.fail(1)
    cluster.fail(2)
    ev = cluster.repair(1)
    assert not ev["ok"] and "insufficient helpers" in ev["error"]
    ev = cluster.fail(99)
    assert not ev["ok"] and "unknown node" in ev["error"]


def test_durability_budget(golden_spec):
    cluster = Cluster.provision(golden_spec, _msg(golden_spec))
    cluster.fail(1)
    cluster.fail(2)
    assert cluster.durable()           # n - k = 2 failures allowed
    cluster.fail(3)
    assert not cluster.durable()


def test_scenario_runner_and_report_json(golden_spec):
    scen = Scenario.from_json(json.dumps({"events": [
        {"fail": 7}, {"repair": 7}, {"assert": "intact"},
        {"assert": "ledger_balanced"}]}))
    report = run_scenario(golden_spec, _msg(golden_spec), scen)
    assert report.all_ok and report.repairs == 1
    doc = json.loads(report.to_json())
    assert doc["all_ok"] is True
    assert doc["ledger"]["received"]["7"] == 8
    assert doc["final"]["live"] == list(range(1, 10))


def test_soak_determinism_and_ledger(golden_spec):
    msg = _msg(golden_spec, 5)
    a = random_failure_soak(golden_spec, msg, 40, seed=12)
    b = random_failure_soak(golden_spec, msg, 40, seed=12)
    assert a.to_json() == b.to_json()
    c = random_failure_soak(golden_spec, msg, 40, seed=13)
    assert c.to_json() != a.to_json()
    assert a.repairs == 40 and a.mismatches == 0
    assert sum(a.sent.values()) == sum(a.received.values()) == 40 * 8
    checks = [e for e in a.events if e["event"] == "soak_check"]
    assert len(checks) == 40 and all(e["ok"] for e in checks)


def test_soak_on_deeper_code(t3_spec):
    report = random_failure_soak(t3_spec, _msg(t3_spec, 1), 30, seed=2)
    assert report.mismatches == 0
    per_repair = t3_spec.params.gamma
    assert sum(report.received.values()) == 30 * per_repair


def test_soak_rejects_negative_steps(golden_spec):
    with pytest.raises(ValueError):
        random_failure_soak(golden_spec, _msg(golden_spec), -1)
