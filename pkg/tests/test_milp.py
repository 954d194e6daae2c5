from __future__ import annotations

import math

import numpy as np
import pytest
from _reference import enumerate_milp, lp_reference

from fcnf_pareto import formulation as fm
from fcnf_pareto.generators import random_network
from fcnf_pareto.milp import (
    BINARY,
    MilpModel,
    ModelError,
    SolverConfig,
    compile_model,
    export_lp,
    solve,
    solve_lp,
)
from fcnf_pareto.milp import _kernels


def random_lp(rng: np.random.Generator) -> MilpModel:
    n = int(rng.integers(1, 8))
    m = int(rng.integers(0, 6))
    model = MilpModel("random")
    for j in range(n):
        lb = float(rng.choice([0.0, -2.0, -math.inf]))
        ub = float(rng.choice([3.0, math.inf, 5.0]))
        model.add_var(f"x{j}", lb=lb, ub=ub)
    for i in range(m):
        a = rng.integers(-3, 4, n).astype(float)
        sense = str(rng.choice(["<=", "=", ">="]))
        model.add_constraint(f"c{i}", {f"x{j}": a[j] for j in range(n)}, sense, float(rng.integers(-5, 6)))
    c = rng.integers(-3, 4, n).astype(float)
    model.set_objective(str(rng.choice(["min", "max"])), {f"x{j}": c[j] for j in range(n)})
    return model


def test_lp_matches_highs_on_random_models():
    rng = np.random.default_rng(0)
    seen = set()
    for _ in range(300):
        model = random_lp(rng)
        ref_status, ref_obj = lp_reference(model)
        res = solve_lp(model)
        seen.add(ref_status)
        assert res.status == ref_status
        if ref_status == "optimal":
            assert res.objective_value == pytest.approx(ref_obj, abs=1e-6, rel=1e-6)
            assert model.violations(res.assignment) == []
    assert seen == {"optimal", "infeasible", "unbounded"}


def test_compiled_and_plain_kernels_agree():
    rng = np.random.default_rng(1)
    cfg = SolverConfig()
    for _ in range(60):
        cm = compile_model(random_lp(rng))
        args = (cm.A, cm.b, cm.c, cm.lo, cm.hi, cm.row_slack, 10_000, 50,
                cfg.feas_tol, cfg.opt_tol, cfg.pivot_tol)
        s1, x1, _ = _kernels.bounded_simplex(*args)
        s2, x2, _ = _kernels.bounded_simplex_py(*args)
        assert s1 == s2
        if s1 == _kernels.OPTIMAL:
            assert cm.c @ x1 == pytest.approx(cm.c @ x2, abs=1e-9)


def knapsack() -> MilpModel:
    model = MilpModel("knapsack")
    weights, values = [3, 4, 5, 2], [4, 5, 6, 3]
    for k in range(4):
        model.add_var(f"z{k}", BINARY)
    model.add_constraint("cap", {f"z{k}": w for k, w in enumerate(weights)}, "<=", 9)
    model.set_objective("max", {f"z{k}": v for k, v in enumerate(values)})
    return model


def test_knapsack_optimum():
    res = solve(knapsack())
    # items 0, 1 and 3 fill the capacity exactly for 12; items 1 and 2 give 11
    assert res.status == "optimal"
    assert res.objective_value == pytest.approx(12.0)
    assert [round(res.assignment[f"z{k}"]) for k in range(4)] == [1, 1, 0, 1]


@pytest.mark.parametrize("seed", range(12))
def test_fcnf_models_match_enumeration(seed):
    net = random_network(seed, n_vertices=(3, 5), n_edges=(4, 6), failable_on_optimum=True)
    model = fm.base_fcnf_model(net)
    ref_status, ref_obj = enumerate_milp(model)
    res = solve(model)
    assert res.status == ref_status
    assert res.objective_value == pytest.approx(ref_obj, abs=1e-6)
    # an initial-cost band no flow can reach
    assert solve(fm.milp3(net, None, 1e9)).status == "infeasible"


def test_infeasible_and_unbounded_relaxations():
    m = MilpModel()
    m.add_var("x", lb=0, ub=1)
    m.add_constraint("c", {"x": 1}, ">=", 2)
    m.set_objective("min", {"x": 1})
    assert solve(m).status == "infeasible"
    assert solve_lp(m).status == "infeasible"

    u = MilpModel()
    u.add_var("x", lb=0)
    u.add_var("z", BINARY)
    u.set_objective("max", {"x": 1, "z": 1})
    assert solve(u).status == "unbounded"


def test_node_limit_reports_iteration_limit():
    net = random_network(4, n_edges=(10, 10), failable_on_optimum=True)
    model = fm.milp3(net, None, solve(fm.base_fcnf_model(net)).objective_value)
    assert solve(model, SolverConfig(node_limit=2)).status == "iteration-limit"
    assert solve(model).status == "optimal"


def test_first_feasible_returns_bound():
    model = knapsack()
    res = solve(model, first_feasible=True)
    assert res.status in ("feasible", "optimal")
    if res.status == "feasible":
        assert res.stats["bound"] >= 12.0 - 1e-9
        assert res.objective_value <= res.stats["bound"] + 1e-9


def test_start_assignment_is_used_or_ignored():
    model = knapsack()
    good = {"z0": 1, "z1": 1, "z2": 0, "z3": 1}
    assert solve(model, start=good).objective_value == pytest.approx(12.0)
    overweight = {"z0": 1, "z1": 1, "z2": 1, "z3": 1}
    assert solve(model, start=overweight).objective_value == pytest.approx(12.0)
    assert solve(model, start={"z0": 1}).objective_value == pytest.approx(12.0)


def test_model_errors():
    m = MilpModel()
    m.add_var("x")
    with pytest.raises(ModelError):
        m.add_var("x")
    with pytest.raises(ModelError):
        m.add_constraint("c", {"y": 1}, "<=", 0)
    with pytest.raises(ModelError):
        m.add_constraint("c", {"x": 1}, "<", 0)
    with pytest.raises(ModelError):
        m.set_objective("minimize", {"x": 1})
    with pytest.raises(ModelError):
        m.add_var("bad", lb=2, ub=1)
    with pytest.raises(ValueError):
        SolverConfig(node_limit=0)
    with pytest.raises(ValueError):
        SolverConfig.from_dict({"nodes": 3})


def test_lp_export_sections_and_names():
    m = MilpModel("export")
    m.add_var("f[a,b]", lb=0, ub=4)
    m.add_var("free", lb=-math.inf)
    m.add_var("y[a,b]", BINARY)
    m.add_constraint("cap[a,b]", {"f[a,b]": 1, "y[a,b]": -4}, "<=", 0)
    m.add_constraint("fix", {"free": 1}, "=", 2.5)
    m.set_objective("min", {"f[a,b]": 1, "y[a,b]": 3, "free": 0.5})
    text = export_lp(m)
    for section in ("Minimize", "Subject To", "Bounds", "Binaries", "End"):
        assert section in text
    assert " free free" in text
    assert "\\ Problem: export" in text
    # brackets are not legal in LP names and get replaced
    assert "[" not in text and " 0 <= f_a,b_ <= 4" in text


@pytest.mark.parametrize("seed", range(5))
def test_lp_export_solves_the_same_in_highs(tmp_path, seed):
    highspy = pytest.importorskip("highspy")
    net = random_network(seed, failable_on_optimum=True)
    model = fm.milp3(net, None, solve(fm.base_fcnf_model(net)).objective_value)
    path = tmp_path / "model.lp"
    path.write_text(export_lp(model))
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    assert h.readModel(str(path)) == highspy.HighsStatus.kOk
    h.run()
    assert h.getModelStatus() == highspy.HighsModelStatus.kOptimal
    ours = solve(model)
    assert ours.objective_value == pytest.approx(h.getInfo().objective_function_value, abs=1e-6)


def test_violations_reports_broken_rows():
    m = knapsack()
    assert m.violations({"z0": 1, "z1": 1, "z2": 1, "z3": 0}) == ["cap"]
    assert m.violations({"z0": 2, "z1": 0, "z2": 0, "z3": 0}) == ["bound:z0"]
