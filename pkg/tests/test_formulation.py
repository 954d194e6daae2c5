from __future__ import annotations

import pytest
from conftest import edge

from fcnf_pareto import formulation as fm
from fcnf_pareto.generators import random_network
from fcnf_pareto.network import FlowNetwork, NetworkError, is_valid_flow, make_solution
from fcnf_pareto.oracle import min_cost_flow_fixed_open


def test_base_model_shape(diamond):
    model = fm.base_fcnf_model(diamond)
    assert len(model.binaries) == len(diamond.edges)
    assert len(model.variables) == 2 * len(diamond.edges)
    # capacity links, conservation at a and b, the target row
    assert len(model.constraints) == len(diamond.edges) + 2 + 1
    assert model.objective.terms[fm.var("y", "sb")] == 4.0


@pytest.mark.parametrize("locked", [frozenset(), frozenset({"sa", "sb"})])
def test_paired_constraint_count(diamond, locked):
    opts = fm.PairedModelOptions(lock_source_flows=bool(locked), locked_edges=locked)
    model = fm.paired_model(diamond, opts)
    assert len(model.constraints) == fm.paired_constraint_count(diamond, opts)
    names = {c.name for c in model.constraints}
    assert "fail" in names
    assert {f"keep[{e.id}]" for e in diamond.edges} <= names
    assert {f"lock[{e}]" for e in locked} <= names


def test_lock_option_validation(diamond):
    with pytest.raises(ValueError):
        fm.PairedModelOptions(locked_edges=frozenset({"sa"}))
    with pytest.raises(NetworkError):
        fm.paired_model(diamond, fm.PairedModelOptions(True, frozenset({"nope"})))


def test_step_models(diamond):
    m1 = fm.milp1(diamond, None, 11.0, 0.5)
    assert m1.objective.sense == "max"
    assert next(c for c in m1.constraints if c.name == "repair_cap").rhs == pytest.approx(10.5)
    with pytest.raises(ValueError):
        fm.milp1(diamond, None, 0.0, 1.0)

    literal = fm.milp2(diamond, None, 10.0)
    relaxed = fm.milp2(diamond, None, 10.0, relaxed=True)
    assert {"repair_lo", "repair_hi"} <= {c.name for c in literal.constraints}
    hi = next(c for c in relaxed.constraints if c.name == "repair_hi")
    assert "repair_lo" not in {c.name for c in relaxed.constraints}
    assert hi.rhs == pytest.approx(10.0 + fm.band(10.0))

    m3 = fm.milp3(diamond, None, 6.0)
    lo = next(c for c in m3.constraints if c.name == "initial_lo")
    assert lo.rhs == pytest.approx(6.0 - 6e-6)


def test_band_scales_with_magnitude():
    assert fm.band(0.0) == fm.EQUALITY_BAND
    assert fm.band(-1e4) == pytest.approx(1e4 * fm.EQUALITY_BAND)


def test_pair_assignment_is_feasible_for_paired_model():
    for seed in range(10):
        net = random_network(seed)
        terminal = min_cost_flow_fixed_open(net, [e for e in net.edge_ids if e != net.failable_edge])
        assign = fm.pair_assignment(net, terminal, terminal)
        assert fm.paired_model(net).violations(assign) == []
        initial, repaired = fm.extract_pair(net, assign)
        assert initial.flow == terminal.flow and repaired.open == terminal.open


def test_pair_with_failed_edge_in_repair_violates(diamond):
    init = make_solution(diamond, {"sa": 2, "at": 2}, {"sa", "at"})
    bad = fm.pair_assignment(diamond, init, init)
    assert "fail" in fm.paired_model(diamond).violations(bad)


def test_extract_flow_rounds_and_clamps(diamond):
    assignment = {}
    for e in diamond.edges:
        assignment[fm.var("y", e.id)] = 0.0
        assignment[fm.var("f", e.id)] = 0.0
    assignment.update({"y[sa]": 0.9999999, "f[sa]": 2.0000001, "y[at]": 1.0, "f[at]": 2.0, "f[ab]": -1e-12})
    sol = fm.extract_flow(diamond, assignment, "y", "f")
    assert sol.open == {"sa", "at"}
    assert sol.flow["sa"] == 2.0 and "ab" not in sol.flow
    assert is_valid_flow(diamond, sol)
    assert sol.cost == pytest.approx(6.0)


def test_fix_open_set_pins_indicators(diamond):
    model = fm.fix_open_set(fm.base_fcnf_model(diamond), "y", {"sa", "at"}, diamond.edge_ids)
    bounds = {v.name: (v.lb, v.ub) for v in model.variables if v.kind == "binary"}
    assert bounds["y[sa]"] == (1.0, 1.0)
    assert bounds["y[sb]"] == (0.0, 0.0)


def test_badly_scaled_costs_warn():
    net = FlowNetwork(
        ("s", "t"),
        (edge("a", "s", "t", 1, 1e-6, 0), edge("b", "s", "t", 1, 1e5, 0)),
        "s", "t", 1.0, "a",
    )
    with pytest.warns(RuntimeWarning, match="orders of magnitude"):
        fm.base_fcnf_model(net)
