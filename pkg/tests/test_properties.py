from __future__ import annotations

import hypothesis.strategies as st
from _reference import close, lp_reference
from hypothesis import HealthCheck, given, settings

from fcnf_pareto import formulation as fm
from fcnf_pareto.generators import random_network
from fcnf_pareto.milp import MilpModel, solve_lp
from fcnf_pareto.network import (
    DirectedEdge,
    FlowNetwork,
    check_repair_pair,
    is_valid_flow,
    network_from_dict,
    network_to_dict,
)
from fcnf_pareto.oracle import OraclePair, brute_force_front, dominance_filter
from fcnf_pareto.pareto import pareto_front

SLOW = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@SLOW
@given(seed=st.integers(0, 2**32 - 1), used=st.booleans())
def test_front_equals_oracle(seed, used):
    net = random_network(seed, failable_on_optimum=used)
    oracle = brute_force_front(net).costs()
    gaps = [a[1] - b[1] for a, b in zip(oracle, oracle[1:])]
    front = pareto_front(net, epsilon=min(gaps) / 2 if gaps else 1e-3)
    assert len(front.points) == len(oracle)
    for p, (i, r) in zip(front.points, oracle):
        assert close(p.initial_cost, i) and close(p.repaired_cost, r)
        assert is_valid_flow(net, p.initial)
        assert is_valid_flow(net, p.repaired, exclude_failable=True)
        assert check_repair_pair(net, p.initial, p.repaired)


@SLOW
@given(seed=st.integers(0, 2**32 - 1), share=st.floats(0.05, 3.0))
def test_any_epsilon_gives_subset_with_endpoints(seed, share):
    net = random_network(seed, failable_on_optimum=True)
    oracle = brute_force_front(net).costs()
    spread = oracle[0][1] - oracle[-1][1]
    front = pareto_front(net, epsilon=max(share * spread, 1e-3))
    got = front.costs()
    assert close(got[0][0], oracle[0][0]) and close(got[-1][1], oracle[-1][1])
    for point in got:
        assert any(close(point[0], o[0]) and close(point[1], o[1]) for o in oracle)


@settings(max_examples=150, deadline=None)
@given(
    n=st.integers(1, 5),
    data=st.data(),
    sense=st.sampled_from(["min", "max"]),
)
def test_lp_matches_reference(n, data, sense):
    coef = st.integers(-4, 4).map(float)
    model = MilpModel()
    for j in range(n):
        lb = data.draw(st.sampled_from([0.0, -3.0, float("-inf")]))
        ub = data.draw(st.sampled_from([2.0, 6.0, float("inf")]))
        model.add_var(f"x{j}", lb=lb, ub=ub)
    for i in range(data.draw(st.integers(0, 4))):
        model.add_constraint(
            f"c{i}", {f"x{j}": data.draw(coef) for j in range(n)},
            data.draw(st.sampled_from(["<=", "=", ">="])), data.draw(coef),
        )
    model.set_objective(sense, {f"x{j}": data.draw(coef) for j in range(n)})
    status, obj = lp_reference(model)
    res = solve_lp(model)
    assert res.status == status
    if status == "optimal":
        assert close(res.objective_value, obj)


@settings(max_examples=200)
@given(st.lists(st.tuples(st.integers(0, 30), st.integers(0, 30)), min_size=1, max_size=25))
def test_dominance_filter_properties(raw):
    pairs = [OraclePair(float(i), float(r), frozenset({str(k)})) for k, (i, r) in enumerate(raw)]
    kept = dominance_filter(pairs)
    costs = [(p.initial_cost, p.repaired_cost) for p in kept]
    assert costs == sorted(costs)
    for a, b in zip(costs, costs[1:]):
        assert a[0] < b[0] and a[1] > b[1]
    for p in pairs:
        assert any(k.initial_cost <= p.initial_cost and k.repaired_cost <= p.repaired_cost for k in kept)


ident = st.text("abcxyz", min_size=1, max_size=3)


@settings(max_examples=100)
@given(
    verts=st.lists(ident, min_size=2, max_size=5, unique=True),
    data=st.data(),
)
def test_network_json_round_trip(verts, data):
    edges = []
    for k in range(data.draw(st.integers(1, 6))):
        tail, head = data.draw(st.lists(st.sampled_from(verts), min_size=2, max_size=2, unique=True))
        edges.append(DirectedEdge(
            f"e{k}", tail, head,
            data.draw(st.floats(0, 1e6)), data.draw(st.floats(0, 1e6)), data.draw(st.floats(0, 1e6)),
        ))
    net = FlowNetwork(
        tuple(verts), tuple(edges), verts[0], verts[1],
        data.draw(st.floats(0, 100)), data.draw(st.sampled_from([e.id for e in edges])),
    )
    assert network_from_dict(network_to_dict(net)) == net


@SLOW
@given(seed=st.integers(0, 2**32 - 1))
def test_paired_model_accepts_oracle_pairs(seed):
    net = random_network(seed, n_edges=(5, 8), failable_on_optimum=True)
    model = fm.paired_model(net)
    front = pareto_front(net)
    for p in front.points:
        assert model.violations(fm.pair_assignment(net, p.initial, p.repaired)) == []
