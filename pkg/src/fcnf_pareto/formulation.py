"""MILP builders for the fixed-charge flow problem and its failure-paired variants.

Variable naming per edge ``e``: ``y[e]``/``f[e]`` in the base model,
``yi[e]``/``fi[e]`` (initial flow) and ``yr[e]``/``fr[e]`` (repaired flow)
in the paired models.
"""

from __future__ import annotations

import warnings
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from .milp import BINARY, MilpModel
from .network import FlowNetwork, FlowSolution, NetworkError, check_network, make_solution

EQUALITY_BAND = 1e-6


@dataclass(frozen=True)
class PairedModelOptions:
    """Optional per-edge locks tying repaired flow to initial flow.

    With ``lock_source_flows`` every edge in ``locked_edges`` must carry the
    same flow before and after the failure.
    """

    lock_source_flows: bool = False
    locked_edges: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "locked_edges", frozenset(self.locked_edges))
        if self.locked_edges and not self.lock_source_flows:
            raise ValueError("locked_edges given without lock_source_flows")


def var(kind: str, edge_id: str) -> str:
    return f"{kind}[{edge_id}]"


def band(rhs: float) -> float:
    return EQUALITY_BAND * max(1.0, abs(rhs))


def _warn_conditioning(net: FlowNetwork) -> None:
    mags = [abs(v) for e in net.edges for v in (e.fixed_cost, e.variable_cost) if v != 0.0]
    if mags and max(mags) / min(mags) > 1e9:
        warnings.warn(
            "cost coefficients span more than 9 orders of magnitude; "
            "simplex results may be inaccurate",
            RuntimeWarning,
            stacklevel=3,
        )


def _add_flow_block(model: MilpModel, net: FlowNetwork, ykind: str, fkind: str, tag: str) -> None:
    for e in net.edges:
        model.add_var(var(ykind, e.id), BINARY)
        model.add_var(var(fkind, e.id), lb=0.0, ub=e.capacity)
    for e in net.edges:
        model.add_constraint(
            f"{tag}cap[{e.id}]", {var(fkind, e.id): 1.0, var(ykind, e.id): -e.capacity}, "<=", 0.0
        )
    out_terms: dict[str, dict[str, float]] = {v: {} for v in net.vertices}
    for e in net.edges:
        out_terms[e.tail][var(fkind, e.id)] = out_terms[e.tail].get(var(fkind, e.id), 0.0) + 1.0
        out_terms[e.head][var(fkind, e.id)] = out_terms[e.head].get(var(fkind, e.id), 0.0) - 1.0
    for v in net.vertices:
        if v in (net.source, net.sink):
            continue
        model.add_constraint(f"{tag}cons[{v}]", out_terms[v], "=", 0.0)
    # net outflow of the source; equals plain outflow when nothing enters it
    model.add_constraint(f"{tag}target", out_terms[net.source], "=", net.target)


def cost_terms(net: FlowNetwork, ykind: str, fkind: str) -> dict[str, float]:
    terms: dict[str, float] = {}
    for e in net.edges:
        terms[var(ykind, e.id)] = e.fixed_cost
        terms[var(fkind, e.id)] = e.variable_cost
    return terms


def base_fcnf_model(net: FlowNetwork) -> MilpModel:
    check_network(net)
    _warn_conditioning(net)
    model = MilpModel("fcnf")
    _add_flow_block(model, net, "y", "f", "")
    model.set_objective("min", cost_terms(net, "y", "f"))
    return model


def paired_model(net: FlowNetwork, opts: PairedModelOptions | None = None) -> MilpModel:
    """Initial and repaired flows side by side, linked through the failure.

    The repaired flow sends nothing over the failable edge and keeps every
    edge bought for the initial flow open. No objective is attached.
    """
    opts = opts or PairedModelOptions()
    check_network(net)
    for eid in opts.locked_edges:
        if not net.has_edge(eid):
            raise NetworkError(f"locked edge {eid!r} is not in the network")
    _warn_conditioning(net)
    model = MilpModel("paired")
    _add_flow_block(model, net, "yi", "fi", "i_")
    _add_flow_block(model, net, "yr", "fr", "r_")
    model.add_constraint("fail", {var("fr", net.failable_edge): 1.0}, "=", 0.0)
    for e in net.edges:
        model.add_constraint(f"keep[{e.id}]", {var("yr", e.id): 1.0, var("yi", e.id): -1.0}, ">=", 0.0)
    if opts.lock_source_flows:
        for eid in sorted(opts.locked_edges):
            model.add_constraint(f"lock[{eid}]", {var("fi", eid): 1.0, var("fr", eid): -1.0}, "=", 0.0)
    return model


def initial_cost_terms(net: FlowNetwork) -> dict[str, float]:
    return cost_terms(net, "yi", "fi")


def repaired_cost_terms(net: FlowNetwork) -> dict[str, float]:
    return cost_terms(net, "yr", "fr")


def add_banded_equality(model: MilpModel, name: str, terms: Mapping[str, float], rhs: float) -> None:
    width = band(rhs)
    model.add_constraint(f"{name}_lo", terms, ">=", rhs - width)
    model.add_constraint(f"{name}_hi", terms, "<=", rhs + width)


def milp1(net: FlowNetwork, opts: PairedModelOptions | None, R_last: float, epsilon: float) -> MilpModel:
    """Most expensive repair that is still at least ``epsilon`` below ``R_last``."""
    if not (R_last > 0 and epsilon > 0):
        raise ValueError("milp1 needs R_last > 0 and epsilon > 0")
    model = paired_model(net, opts)
    model.name = "milp1"
    terms = repaired_cost_terms(net)
    model.set_objective("max", terms)
    model.add_constraint("repair_cap", terms, "<=", R_last - epsilon)
    return model


def milp2(net: FlowNetwork, opts: PairedModelOptions | None, R_step1: float, relaxed: bool = False) -> MilpModel:
    """Cheapest initial flow whose repair costs ``R_step1``.

    ``relaxed`` replaces the equality by ``<= R_step1`` (see ``pareto``).
    """
    model = paired_model(net, opts)
    model.name = "milp2"
    model.set_objective("min", initial_cost_terms(net))
    terms = repaired_cost_terms(net)
    if relaxed:
        model.add_constraint("repair_hi", terms, "<=", R_step1 + band(R_step1))
    else:
        add_banded_equality(model, "repair", terms, R_step1)
    return model


def milp3(net: FlowNetwork, opts: PairedModelOptions | None, I_step2: float) -> MilpModel:
    """Cheapest repair among initial flows costing ``I_step2``."""
    model = paired_model(net, opts)
    model.name = "milp3"
    model.set_objective("min", repaired_cost_terms(net))
    add_banded_equality(model, "initial", initial_cost_terms(net), I_step2)
    return model


# -- extraction ---------------------------------------------------------------

def extract_flow(net: FlowNetwork, assignment: Mapping[str, float], ykind: str, fkind: str) -> FlowSolution:
    """FlowSolution from solved values: binaries rounded, flows clamped to [0, capacity]."""
    flow: dict[str, float] = {}
    open_edges: list[str] = []
    for e in net.edges:
        if round(assignment[var(ykind, e.id)]) >= 1:
            open_edges.append(e.id)
        f = min(max(assignment[var(fkind, e.id)], 0.0), e.capacity)
        if f != 0.0:
            flow[e.id] = f
    return make_solution(net, flow, open_edges)


def extract_pair(net: FlowNetwork, assignment: Mapping[str, float]) -> tuple[FlowSolution, FlowSolution]:
    return (
        extract_flow(net, assignment, "yi", "fi"),
        extract_flow(net, assignment, "yr", "fr"),
    )


def pair_assignment(net: FlowNetwork, initial: FlowSolution, repaired: FlowSolution) -> dict[str, float]:
    """Paired-model values for a given (initial, repaired) pair, e.g. as a solver start."""
    out: dict[str, float] = {}
    for e in net.edges:
        out[var("yi", e.id)] = 1.0 if e.id in initial.open else 0.0
        out[var("fi", e.id)] = float(initial.flow.get(e.id, 0.0))
        out[var("yr", e.id)] = 1.0 if e.id in repaired.open else 0.0
        out[var("fr", e.id)] = float(repaired.flow.get(e.id, 0.0))
    return out


def fix_open_set(model: MilpModel, ykind: str, open_edges: Iterable[str], edge_ids: Iterable[str]) -> MilpModel:
    """Copy of ``model`` with the indicator of each edge pinned to membership in ``open_edges``."""
    chosen = set(open_edges)
    fixed = model.copy()
    for eid in edge_ids:
        v = fixed.variables[fixed.var_index(var(ykind, eid))]
        v.lb = v.ub = 1.0 if eid in chosen else 0.0
    return fixed


def paired_constraint_count(net: FlowNetwork, opts: PairedModelOptions | None = None) -> int:
    opts = opts or PairedModelOptions()
    internal = len(net.vertices) - 2
    locks = len(opts.locked_edges) if opts.lock_source_flows else 0
    return 2 * (len(net.edges) + internal + 1) + 1 + len(net.edges) + locks

