"""Brute-force ground truth for small instances.

Nothing here touches the MILP solver: every cost comes from exhaustive
enumeration of open-edge sets, each completed by a successive-shortest-path
min-cost flow.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from . import _flowkernels
from .network import FlowNetwork, FlowSolution, check_network, make_solution

DOMINANCE_TOL = 1e-9
DEFAULT_EDGE_CAP = 15


class OracleRefusal(ValueError):
    """Instance too large for exhaustive enumeration."""


@dataclass(frozen=True)
class OraclePair:
    initial_cost: float
    repaired_cost: float
    initial_open: frozenset[str]


@dataclass(frozen=True)
class OracleFront:
    pairs: tuple[OraclePair, ...]

    def costs(self) -> list[tuple[float, float]]:
        return [(p.initial_cost, p.repaired_cost) for p in self.pairs]

    def min_repaired_gap(self) -> float:
        rs = [p.repaired_cost for p in self.pairs]
        gaps = [a - b for a, b in zip(rs, rs[1:])]
        return min(gaps) if gaps else float("inf")


def _arrays(net: FlowNetwork):
    vid = {v: k for k, v in enumerate(net.vertices)}
    tails = np.array([vid[e.tail] for e in net.edges], dtype=np.int64)
    heads = np.array([vid[e.head] for e in net.edges], dtype=np.int64)
    caps = np.array([e.capacity for e in net.edges], dtype=np.float64)
    costs = np.array([e.variable_cost for e in net.edges], dtype=np.float64)
    return vid, tails, heads, caps, costs


def min_cost_flow_fixed_open(
    net: FlowNetwork, open_set: Iterable[str], exclude_failable: bool = False
) -> FlowSolution | None:
    """Cheapest flow of value T over ``open_set``; the whole set pays its fixed charge.

    Returns None when the open edges cannot carry the target.
    """
    open_set = frozenset(open_set)
    for eid in open_set:
        net.edge(eid)
    vid, tails, heads, caps, costs = _arrays(net)
    usable = np.array(
        [e.id in open_set and not (exclude_failable and e.id == net.failable_edge) for e in net.edges],
        dtype=np.bool_,
    )
    ok, _, flow = _flowkernels.ssp_min_cost_flow(
        len(net.vertices), tails, heads, caps, costs, usable,
        vid[net.source], vid[net.sink], float(net.target),
    )
    if not ok:
        return None
    flows = {e.id: float(flow[k]) for k, e in enumerate(net.edges) if flow[k] != 0.0}
    return make_solution(net, flows, open_set)


def optimal_repair_cost(net: FlowNetwork, initial: FlowSolution) -> float | None:
    """Cheapest repaired flow that keeps paying for ``initial.open``.

    Tries every set of extra edges outside the initial open set.
    """
    check_network(net)
    base = sorted(initial.open, key=net.edge_index)
    extra = [e.id for e in net.edges if e.id not in initial.open]
    if len(extra) > 20:
        raise OracleRefusal(f"{len(extra)} candidate repair edges is too many to enumerate")
    best = None
    for r in range(len(extra) + 1):
        for added in itertools.combinations(extra, r):
            sol = min_cost_flow_fixed_open(net, (*base, *added), exclude_failable=True)
            if sol is not None and (best is None or sol.cost < best):
                best = sol.cost
    return best


def subset_tables(net: FlowNetwork) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Initial cost and best repair cost for every open set, plus fixed charges.

    Bit ``k`` of a mask stands for ``net.edges[k]``. Repair cost of an open
    set O is the minimum, over supersets R of O, of the fixed charges of R plus
    the cheapest flow over R without the failable edge.
    """
    vid, tails, heads, caps, costs = _arrays(net)
    n_edges = len(net.edges)
    variable = _flowkernels.subset_flow_costs(
        len(net.vertices), tails, heads, caps, costs,
        vid[net.source], vid[net.sink], float(net.target),
    )
    masks = np.arange(1 << n_edges, dtype=np.int64)
    fixed = np.zeros(1 << n_edges)
    for k, e in enumerate(net.edges):
        fixed += ((masks >> k) & 1) * e.fixed_cost
    initial = fixed + variable

    w = net.edge_index(net.failable_edge)
    repaired = fixed + variable[masks & ~(1 << w)]
    # superset minimum, one bit at a time
    for k in range(n_edges):
        view = repaired.reshape(-1, 2, 1 << k)
        np.minimum(view[:, 0, :], view[:, 1, :], out=view[:, 0, :])
    return initial, repaired, fixed


def dominance_filter(candidates: Iterable[OraclePair], tol: float = DOMINANCE_TOL) -> tuple[OraclePair, ...]:
    """Mutually non-dominated pairs, sorted by initial cost."""
    ordered = sorted(candidates, key=lambda p: (p.initial_cost, p.repaired_cost))
    kept: list[OraclePair] = []
    best_r = float("inf")
    for p in ordered:
        if p.repaired_cost < best_r - tol:
            if kept and abs(kept[-1].initial_cost - p.initial_cost) <= tol:
                # same initial cost within tolerance: the cheaper repair wins
                kept[-1] = p
            else:
                kept.append(p)
            best_r = p.repaired_cost
    return tuple(kept)


def brute_force_front(net: FlowNetwork, max_edges: int = DEFAULT_EDGE_CAP) -> OracleFront:
    check_network(net)
    if len(net.edges) > max_edges:
        raise OracleRefusal(f"{len(net.edges)} edges exceeds the oracle cap of {max_edges}")
    initial, repaired, _ = subset_tables(net)
    ok = np.isfinite(initial) & np.isfinite(repaired)
    cands = []
    for mask in np.nonzero(ok)[0]:
        opened = frozenset(e.id for k, e in enumerate(net.edges) if (int(mask) >> k) & 1)
        cands.append(OraclePair(float(initial[mask]), float(repaired[mask]), opened))
    return OracleFront(dominance_filter(cands))


def base_optimum(net: FlowNetwork, exclude_failable: bool = False) -> float | None:
    """Exhaustive FCNF optimum, optionally with the failable edge unusable."""
    initial, _, _ = subset_tables(net)
    if exclude_failable:
        w = net.edge_index(net.failable_edge)
        initial = np.where((np.arange(initial.size) >> w) & 1, np.inf, initial)
    best = float(initial.min())
    return best if np.isfinite(best) else None
