"""Iterative three-MILP search for the initial-cost / repaired-cost trade-off.

Each step asks three questions in turn:

1. what is the most expensive repair still ``epsilon`` cheaper than the last one;
2. what is the cheapest initial flow whose repair costs that much;
3. among initial flows of exactly that cost, what is the cheapest repair.

The answer to (3) is the next point. The search starts from the minimum
cost flow with its best repair and stops once no repair below the last one
exists, which happens at the min-cost flow that avoids the failable edge.
A coarse ``epsilon`` can step past that flow; the front is then closed with
an explicit point at the terminal repair cost.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass
from typing import Any

from . import formulation as fm
from .milp import MilpModel, MilpResult, SolverConfig, solve, solve_lp
from .network import FlowNetwork, FlowSolution, check_network, make_solution

log = logging.getLogger(__name__)

MAX_ITERATIONS = 10_000
ENDPOINT_RTOL = 1e-6


class NoFlowError(RuntimeError):
    """The network cannot carry the target flow at all."""


class NoRepairError(RuntimeError):
    """The network cannot carry the target once the failable edge is gone."""


class InconsistencyError(RuntimeError):
    """A model that is feasible by construction came back infeasible."""


class SolverLimitError(RuntimeError):
    """The MILP solver hit its node or time limit."""


@dataclass(frozen=True)
class ParetoPoint:
    iteration: int
    initial: FlowSolution
    repaired: FlowSolution

    @property
    def initial_cost(self) -> float:
        return self.initial.cost

    @property
    def repaired_cost(self) -> float:
        return self.repaired.cost

    def to_dict(self) -> dict[str, Any]:
        return {
            "iteration": self.iteration,
            "initial_cost": self.initial_cost,
            "repaired_cost": self.repaired_cost,
            "initial": self.initial.to_dict(),
            "repaired": self.repaired.to_dict(),
        }


@dataclass(frozen=True)
class ParetoFront:
    points: tuple[ParetoPoint, ...]
    epsilon: float
    terminal_cost: float
    base_cost: float

    def costs(self) -> list[tuple[float, float]]:
        return [(p.initial_cost, p.repaired_cost) for p in self.points]

    def to_dict(self) -> dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "base_cost": self.base_cost,
            "terminal_cost": self.terminal_cost,
            "points": [p.to_dict() for p in self.points],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["iteration", "initial_cost", "repaired_cost"])
        for p in self.points:
            writer.writerow([p.iteration, f"{p.initial_cost:.6f}", f"{p.repaired_cost:.6f}"])
        return buf.getvalue()


def _run(
    model: MilpModel,
    config: SolverConfig | None,
    first_feasible: bool = False,
    start: dict[str, float] | None = None,
) -> MilpResult:
    res = solve(model, config, first_feasible=first_feasible, start=start)
    log.debug("%s: %s obj=%s nodes=%s", model.name, res.status, res.objective_value, res.stats.get("nodes"))
    if res.status == "iteration-limit":
        raise SolverLimitError(f"{model.name}: solver limit reached after {res.stats.get('nodes')} nodes")
    if res.status == "unbounded":
        raise InconsistencyError(f"{model.name}: unbounded relaxation")
    return res


def min_cost_flow(net: FlowNetwork, config: SolverConfig | None = None) -> FlowSolution | None:
    """Optimal FCNF flow, or None if the target cannot be met."""
    res = _run(fm.base_fcnf_model(net), config)
    if not res.optimal:
        return None
    return fm.extract_flow(net, res.assignment, "y", "f")


def terminal_flow(net: FlowNetwork, config: SolverConfig | None = None) -> FlowSolution | None:
    """Optimal FCNF flow on the network without the failable edge."""
    if len(net.edges) == 1:
        return make_solution(net, {}, ()) if net.target == 0 else None
    reduced = net.without_edge(net.failable_edge)
    sol = min_cost_flow(reduced, config)
    if sol is None:
        return None
    return make_solution(net, sol.flow, sol.open)


def _polish(
    net: FlowNetwork,
    opts: fm.PairedModelOptions | None,
    assignment: dict[str, float],
    config: SolverConfig | None,
) -> dict[str, float]:
    """Re-route both flows over the chosen open sets without band residue.

    The banded equalities let a solve drift by up to the band width, e.g. by
    pushing a sliver of flow over a dearer edge. With the open sets pinned, a
    pair of LPs first minimises the repaired cost without raising the initial
    cost, then minimises the initial cost without raising the repaired cost.
    """
    model = fm.paired_model(net, opts)
    for v in model.variables:
        if v.kind == "binary":
            v.lb = v.ub = float(round(assignment[v.name]))
    i_terms, r_terms = fm.initial_cost_terms(net), fm.repaired_cost_terms(net)
    i_cost = model.evaluate(i_terms, assignment)

    first = model.copy()
    first.add_constraint("initial_hi", i_terms, "<=", i_cost + 1e-12 * max(1.0, abs(i_cost)))
    first.set_objective("min", r_terms)
    res = solve_lp(first, config)
    if not res.optimal:
        return assignment
    r_cost = res.objective_value
    second = model.copy()
    second.add_constraint("repair_hi", r_terms, "<=", r_cost + 1e-12 * max(1.0, abs(r_cost)))
    second.set_objective("min", i_terms)
    res2 = solve_lp(second, config)
    return res2.assignment if res2.optimal else res.assignment


def _point(
    net: FlowNetwork,
    opts: fm.PairedModelOptions | None,
    assignment: dict[str, float],
    iteration: int,
    config: SolverConfig | None,
) -> ParetoPoint:
    initial, repaired = fm.extract_pair(net, _polish(net, opts, assignment, config))
    return ParetoPoint(iteration, initial, repaired)


def initial_point(
    net: FlowNetwork,
    opts: fm.PairedModelOptions | None = None,
    config: SolverConfig | None = None,
) -> ParetoPoint:
    """Minimum-cost initial flow together with the cheapest repair over all such flows."""
    check_network(net)
    base = _run(fm.base_fcnf_model(net), config)
    if not base.optimal:
        raise NoFlowError("target flow cannot be routed through the network")
    res = _run(fm.milp3(net, opts, base.objective_value), config)
    if not res.optimal:
        raise NoRepairError("no repaired flow exists for a minimum-cost initial flow")
    return _point(net, opts, res.assignment, 0, config)


def next_point(
    net: FlowNetwork,
    opts: fm.PairedModelOptions | None,
    R_last: float,
    epsilon: float,
    iteration: int,
    config: SolverConfig | None = None,
    relaxed_step2: bool = True,
    repair_floor: float | None = None,
    start: dict[str, float] | None = None,
) -> ParetoPoint | None:
    """Next point with repair cost at most ``R_last - epsilon``, or None when exhausted.

    ``repair_floor`` is a known lower bound on every repaired cost (the
    cheapest flow avoiding the failable edge). A cap below it is infeasible
    without asking the solver, which would otherwise have to close a whole
    search tree to prove it.

    ``start`` is a paired assignment with repaired cost at or below the
    floor (the failable-edge-free optimum used for both roles). It is
    feasible for steps 1 and 2 whenever the cap admits any repair, and seeds
    both searches.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    cap = R_last - epsilon
    if cap < 0:
        return None
    if repair_floor is not None and cap < repair_floor - 1e-9 * max(1.0, abs(repair_floor)):
        return None
    # The relaxed step 2 only needs an upper bound on step 1's optimum that
    # is still below the cap: every repair under the cap is under that bound
    # too, so both give step 2 the same feasible set. The first incumbent
    # together with the search's proven bound is enough.
    step1 = _run(fm.milp1(net, opts, R_last, epsilon), config, first_feasible=relaxed_step2, start=start)
    if step1.status == "infeasible":
        return None
    if step1.status == "feasible":
        R_step1 = min(step1.stats["bound"], cap)
    else:
        R_step1 = step1.objective_value
    step2 = _run(fm.milp2(net, opts, R_step1, relaxed=relaxed_step2), config, start=start)
    if not step2.optimal:
        raise InconsistencyError(f"step 2 infeasible at R_step1={R_step1!r}")
    I_step2 = step2.objective_value
    step3 = _run(fm.milp3(net, opts, I_step2), config, start=step2.assignment)
    if not step3.optimal:
        raise InconsistencyError(f"step 3 infeasible at I_step2={I_step2!r}")
    return _point(net, opts, step3.assignment, iteration, config)


def closing_point(
    net: FlowNetwork,
    opts: fm.PairedModelOptions | None,
    terminal_cost: float,
    iteration: int,
    config: SolverConfig | None = None,
    start: dict[str, float] | None = None,
) -> ParetoPoint:
    """Cheapest initial flow whose repair reaches the terminal cost, then its cheapest repair.

    Steps 2 and 3 with the repair cost pinned at the terminal cost; no
    repair is cheaper, so the one-sided bound is an equality.
    """
    step2 = _run(fm.milp2(net, opts, terminal_cost, relaxed=True), config, start=start)
    if not step2.optimal:
        raise InconsistencyError(f"no initial flow reaches the terminal repair cost {terminal_cost!r}")
    step3 = _run(fm.milp3(net, opts, step2.objective_value), config, start=step2.assignment)
    if not step3.optimal:
        raise InconsistencyError(f"closing step infeasible at I={step2.objective_value!r}")
    return _point(net, opts, step3.assignment, iteration, config)


def default_epsilon(terminal_cost: float) -> float:
    return 1e-4 * max(1.0, terminal_cost)


def pareto_front(
    net: FlowNetwork,
    opts: fm.PairedModelOptions | None = None,
    epsilon: float | None = None,
    config: SolverConfig | None = None,
    max_iterations: int = MAX_ITERATIONS,
    relaxed_step2: bool = True,
) -> ParetoFront:
    """Walk the front from the min-cost flow to the min-cost flow avoiding the failable edge.

    ``relaxed_step2=False`` runs the second model with the repair cost held
    at exactly the first model's optimum instead of at most that value.
    """
    check_network(net)
    base = min_cost_flow(net, config)
    if base is None:
        raise NoFlowError("target flow cannot be routed through the network")
    terminal = terminal_flow(net, config)
    if terminal is None:
        raise NoRepairError("target flow cannot be routed without the failable edge")
    if epsilon is None:
        epsilon = default_epsilon(terminal.cost)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")

    start = fm.pair_assignment(net, terminal, terminal)
    points = [initial_point(net, opts, config)]
    while True:
        if len(points) >= max_iterations:
            raise InconsistencyError(f"no convergence after {max_iterations} iterations")
        nxt = next_point(
            net, opts, points[-1].repaired_cost, epsilon, len(points), config, relaxed_step2,
            repair_floor=terminal.cost, start=start,
        )
        if nxt is None:
            break
        points.append(nxt)

    tol = ENDPOINT_RTOL * max(1.0, abs(terminal.cost))
    if points[-1].repaired_cost > terminal.cost + tol:
        # epsilon stepped past the terminal flow. Replacing the last
        # intermediate point keeps every step at least epsilon, since the
        # terminal cost is below it; a lone starting point gets the closing
        # point appended instead.
        if len(points) > 1:
            points[-1] = closing_point(net, opts, terminal.cost, points[-1].iteration, config, start)
        else:
            points.append(closing_point(net, opts, terminal.cost, 1, config, start))

    last = points[-1].repaired_cost
    if abs(last - terminal.cost) > tol:
        raise InconsistencyError(
            f"front ends at repaired cost {last!r}, expected terminal cost {terminal.cost!r}"
        )
    return ParetoFront(tuple(points), epsilon, terminal.cost, base.cost)


def max_iterations_bound(R0: float, terminal_cost: float, epsilon: float) -> int:
    return math.ceil((R0 - terminal_cost) / epsilon) + 1
