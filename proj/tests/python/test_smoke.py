import pytest

import netupd


def switch_names(scenario, commands):
    names = {s["id"]: s.get("name") for s in scenario["initial"]["switches"]}
    return [names[c["switch"]] if c["op"] != "wait" else "wait" for c in commands]


def test_worked_example_orders_c2_before_a1():
    sc = netupd.example()
    r = netupd.order_update(sc["initial"], sc["final"], sc["property"])
    assert r["ok"]
    assert switch_names(sc, r["commands"]) == ["C2", "wait", "A1", "wait"]
    assert netupd.verify(sc["initial"], r["commands"], sc["property"])["ok"]


def test_waypoint_example_keeps_one_wait():
    sc = netupd.example(waypoint=True)
    r = netupd.order_update(sc["initial"], sc["final"], sc["property"])
    w = netupd.remove_waits(sc["initial"], r["commands"], sc["property"])
    assert w["retained"] == 1
    assert switch_names(sc, w["commands"]) == ["A2", "A4", "T1", "wait", "C1"]
    assert netupd.verify(sc["initial"], w["commands"], sc["property"])["ok"]


def test_model_check_reports_counterexample():
    sc = netupd.example()
    assert netupd.model_check(sc["initial"], sc["property"])["ok"]
    broken = dict(sc["initial"])
    broken["switches"] = [dict(s, rules=[]) if s.get("name") == "C1" else s
                          for s in sc["initial"]["switches"]]
    res = netupd.model_check(broken, sc["property"])
    assert not res["ok"]
    assert res["counterexample"]


def test_double_diamond_needs_rule_granularity():
    sc = netupd.diamond(30, double_diamond=True, seed=1)
    a = netupd.order_update(sc["initial"], sc["final"], sc["property"])
    b = netupd.order_update(sc["initial"], sc["final"], sc["property"], granularity="rule")
    assert not a["ok"]
    assert b["ok"]


def test_generators_and_errors():
    t = netupd.fattree(4)
    assert len(t["names"]) == 20
    assert netupd.smallworld(30, seed=3) == netupd.smallworld(30, seed=3)
    g = netupd.parse_gml("graph [ node [ id 1 ] node [ id 2 ] edge [ source 1 target 2 ] "
                         "edge [ source 2 target 1 ] ]")
    assert len(g["topology"]["edges"]) == 1
    assert g["warnings"]
    with pytest.raises(netupd.TopologyError):
        netupd.fattree(3)
    with pytest.raises(netupd.LtlError):
        netupd.normalize_formula("(a U")


def test_simulation_ends_in_final_configuration():
    sc = netupd.example()
    r = netupd.order_update(sc["initial"], sc["final"], sc["property"])
    sim = netupd.simulate(sc["initial"], r["commands"], seed=4, inject=4)
    assert sim["final"]["switches"] == sc["final"]["switches"]
    assert sim["traces"]
