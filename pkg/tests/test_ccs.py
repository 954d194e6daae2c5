from __future__ import annotations

import json

import pytest
from _reference import cid_direct_optimum, close

from fcnf_pareto import ccs
from fcnf_pareto import formulation as fm
from fcnf_pareto.milp import solve
from fcnf_pareto.network import network_from_dict, network_to_dict


def minimal_doc() -> dict:
    return {
        "sources": [{"id": "plant", "capacity": 2, "fixed_cost": 1, "variable_cost": 3}],
        "sinks": [{"id": "well", "capacity": 5, "fixed_cost": 4, "variable_cost": 1}],
        "junctions": [],
        "pipes": [{"id": "p", "tail": "plant", "head": "well", "capacity": 3, "fixed_cost": 7, "variable_cost": 2}],
        "target": 2,
        "failable_sink": "well",
        "project_years": 1,
    }


def test_minimal_reduction_structure():
    cid = ccs.cid_from_dict(minimal_doc())
    net = ccs.reduce_cid_to_fcnf(cid)
    assert len(net.vertices) == 2 + 2
    assert len(net.edges) == 1 + 2
    assert net.source == ccs.SUPER_SOURCE and net.sink == ccs.SUPER_SINK
    assert net.failable_edge == "storage:well"
    cap = net.edge("capture:plant")
    assert (cap.tail, cap.head, cap.capacity, cap.fixed_cost, cap.variable_cost) == (
        ccs.SUPER_SOURCE, "plant", 2.0, 1.0, 3.0
    )
    store = net.edge("storage:well")
    assert (store.tail, store.head, store.capacity) == ("well", ccs.SUPER_SINK, 5.0)
    # 1 + 7 + 4 fixed, 2 units at 3 + 2 + 1
    assert solve(fm.base_fcnf_model(net)).objective_value == pytest.approx(24.0)


@pytest.mark.parametrize("seed", range(15))
def test_reduction_matches_direct_enumeration(seed):
    cid = ccs.random_cid(seed)
    net = ccs.reduce_cid_to_fcnf(cid)
    res = solve(fm.base_fcnf_model(net))
    direct = cid_direct_optimum(cid)
    assert res.status == "optimal" and close(res.objective_value, direct)


def test_annualize_scales_only_variable_costs():
    doc = minimal_doc()
    doc["project_years"] = 20
    cid = ccs.annualize_costs(ccs.cid_from_dict(doc))
    assert cid.sources[0].variable_cost == 60.0 and cid.sources[0].fixed_cost == 1.0
    assert cid.pipes[0].variable_cost == 40.0 and cid.pipes[0].fixed_cost == 7.0
    assert cid.sinks[0].variable_cost == 20.0


def test_capture_lock_options():
    cid = ccs.random_cid(2, n_sources=3)
    opts = ccs.capture_lock_options(cid)
    assert opts.lock_source_flows
    assert opts.locked_edges == {"capture:src0", "capture:src1", "capture:src2"}


@pytest.mark.parametrize(
    "mutate, fragment",
    [
        (lambda d: d.update(failable_sink="plant"), "failable_sink"),
        (lambda d: d["pipes"][0].update(head="nowhere"), "not a declared vertex"),
        (lambda d: d["pipes"][0].update(id="capture:x"), "reserved"),
        (lambda d: d["junctions"].append("plant"), "more than once"),
        (lambda d: d["junctions"].append(ccs.SUPER_SINK), "reserved"),
        (lambda d: d.update(target=10), "source capacity"),
        (lambda d: d.update(project_years=0), "project_years"),
        (lambda d: d.update(extra=1), "unknown top-level"),
        (lambda d: d.pop("pipes"), "missing"),
        (lambda d: d["sources"][0].update(capacity=-1), "capacity"),
    ],
)
def test_bad_instances(mutate, fragment):
    doc = minimal_doc()
    mutate(doc)
    with pytest.raises(ccs.CidError, match=fragment):
        ccs.cid_from_dict(doc)


def test_parse_reports_json_position():
    with pytest.raises(ccs.CidError, match="line 1"):
        ccs.parse_cid("{oops")


def test_round_trip():
    cid = ccs.nevada_like(3)
    assert ccs.cid_from_dict(json.loads(json.dumps(ccs.cid_to_dict(cid)))) == cid


def test_nevada_like_shape():
    cid = ccs.nevada_like(0)
    assert len(cid.sources) == 21 and len(cid.sinks) == 3
    assert cid.synthetic and cid.project_years == 20 and cid.target == 8.0
    # shares of 15.92 with a 0.05 floor per source
    assert 15.9 <= sum(s.capacity for s in cid.sources) <= 15.92 + 21 * 0.05
    net = ccs.reduce_cid_to_fcnf(ccs.annualize_costs(cid))
    assert len(net.edges) == 21 + 21 + 8 + 3
    assert net.failable_edge == "storage:snk2"
    assert net.metadata["synthetic"] is True
    assert network_from_dict(network_to_dict(net)) == net
    # the network stays feasible without the failable sink
    assert sum(s.capacity for s in cid.sinks if s.id != cid.failable_sink) >= cid.target


def test_nevada_like_is_seeded():
    assert ccs.nevada_like(4) == ccs.nevada_like(4)
    assert ccs.nevada_like(4) != ccs.nevada_like(5)
