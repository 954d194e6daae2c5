from __future__ import annotations

import json
import math

import pytest
from conftest import edge

from fcnf_pareto.network import (
    FlowNetwork,
    NetworkError,
    check_repair_pair,
    flow_cost,
    is_valid_flow,
    load_network,
    make_solution,
    network_from_dict,
    network_to_dict,
    validate_network,
)


def test_flow_cost_counts_open_edges_even_without_flow(diamond):
    sol = make_solution(diamond, {"sa": 2, "ab": 2, "bt": 2}, {"sa", "ab", "bt", "at"})
    # fixed 1+1+4+1, variable 2*1 + 0 + 2*1
    assert sol.cost == pytest.approx(11.0)
    assert flow_cost(diamond, sol) == sol.cost


def test_valid_flow_checks(diamond):
    good = make_solution(diamond, {"sa": 2, "at": 2}, {"sa", "at"})
    assert is_valid_flow(diamond, good)
    assert not is_valid_flow(diamond, good, exclude_failable=True)
    over = make_solution(diamond, {"sa": 3, "at": 3}, {"sa", "at"})
    assert not is_valid_flow(diamond, over)
    unpaid = make_solution(diamond, {"sa": 2, "at": 2}, {"sa"})
    assert not is_valid_flow(diamond, unpaid)
    leaky = make_solution(diamond, {"sa": 2, "at": 1}, {"sa", "at"})
    assert not is_valid_flow(diamond, leaky)
    short = make_solution(diamond, {"sa": 1, "at": 1}, {"sa", "at"})
    assert not is_valid_flow(diamond, short)


def test_target_is_net_outflow_of_source():
    net = FlowNetwork(
        ("s", "a", "t"),
        (edge("sa", "s", "a", 3), edge("as", "a", "s", 3), edge("at", "a", "t", 3)),
        "s", "t", 1.0, "at",
    )
    looped = make_solution(net, {"sa": 2, "as": 1, "at": 1}, {"sa", "as", "at"})
    assert is_valid_flow(net, looped)


def test_repair_pair_keeps_initial_open_set(diamond):
    init = make_solution(diamond, {"sa": 2, "at": 2}, {"sa", "at"})
    rep = make_solution(diamond, {"sa": 2, "ab": 2, "bt": 2}, {"sa", "at", "ab", "bt"})
    assert check_repair_pair(diamond, init, rep)
    dropped = make_solution(diamond, {"sa": 2, "ab": 2, "bt": 2}, {"sa", "ab", "bt"})
    assert not check_repair_pair(diamond, init, dropped)


def test_unknown_edge_in_solution_raises(diamond):
    with pytest.raises(NetworkError):
        make_solution(diamond, {"zz": 1.0}, {"zz"})


@pytest.mark.parametrize(
    "mutate, fragment",
    [
        (lambda d: d.update(source="t"), "source/sink"),
        (lambda d: d.update(sink="nowhere"), "sink"),
        (lambda d: d.update(target=-1), "target"),
        (lambda d: d.update(failable_edge="zz"), "failable_edge"),
        (lambda d: d["edges"].append(dict(d["edges"][0])), "duplicate edge id"),
        (lambda d: d["edges"][0].update(head="s"), "self-loop"),
        (lambda d: d["edges"][0].update(capacity=-2), "capacity"),
        (lambda d: d["edges"][0].update(tail="q"), "endpoint"),
        (lambda d: d["vertices"].append("s"), "duplicate vertex"),
    ],
)
def test_invalid_documents_are_rejected(diamond, mutate, fragment):
    doc = network_to_dict(diamond)
    mutate(doc)
    with pytest.raises(NetworkError, match=fragment):
        network_from_dict(doc)


def test_schema_errors(diamond):
    doc = network_to_dict(diamond)
    with pytest.raises(NetworkError, match="unknown network fields"):
        network_from_dict({**doc, "bogus": 1})
    with pytest.raises(NetworkError, match="missing"):
        network_from_dict({k: v for k, v in doc.items() if k != "target"})
    bad = json.loads(json.dumps(doc))
    bad["edges"][0]["capacity"] = "3"
    with pytest.raises(NetworkError, match="expected a number"):
        network_from_dict(bad)
    with pytest.raises(NetworkError):
        network_from_dict([])


def test_nan_and_inf_costs_are_reported(diamond):
    edges = list(diamond.edges)
    edges[0] = edge("sa", "s", "a", 2, math.inf, 1)
    edges[1] = edge("at", "a", "t", 2, 1, math.nan)
    net = FlowNetwork(diamond.vertices, tuple(edges), "s", "t", 2.0, "at")
    problems = validate_network(net)
    assert any("fixed_cost" in p for p in problems)
    assert any("variable_cost" in p for p in problems)


def test_round_trip_with_metadata(tmp_path, diamond):
    net = FlowNetwork(
        diamond.vertices, diamond.edges, "s", "t", 2.0, "at", metadata={"note": "x", "locked_edges": ["sa"]}
    )
    path = tmp_path / "net.json"
    path.write_text(json.dumps(network_to_dict(net)))
    back = load_network(path)
    assert back == net
    assert dict(back.metadata) == {"note": "x", "locked_edges": ["sa"]}


def test_parallel_edges_are_distinct():
    net = FlowNetwork(
        ("s", "t"),
        (edge("cheap", "s", "t", 1, 1, 0), edge("wide", "s", "t", 5, 3, 0)),
        "s", "t", 2.0, "wide",
    )
    assert validate_network(net) == []
    assert net.edge("wide").capacity == 5
    assert net.without_edge("wide").edge_ids == ("cheap",)


def test_invalid_json_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(NetworkError, match="not valid JSON"):
        load_network(path)
