"""Seeded instance generators for tests, demos and the ``gen`` subcommand."""

from __future__ import annotations

import numpy as np

from .network import DirectedEdge, FlowNetwork


def random_network(
    seed: int | np.random.Generator,
    n_vertices: tuple[int, int] = (4, 7),
    n_edges: tuple[int, int] = (6, 10),
    fixed_range: tuple[int, int] = (1, 20),
    variable_range: tuple[int, int] = (0, 5),
    targets: tuple[int, ...] = (1, 2, 3),
    require_feasible: bool = True,
    failable_on_optimum: bool = False,
) -> FlowNetwork:
    """Small random FCNF instance with integer data.

    Edges never enter the source or leave the sink. With
    ``require_feasible`` the draw is repeated until the network carries the
    target both with and without the failable edge, and the failable edge
    lies on some source-sink path. With ``failable_on_optimum`` the failable
    edge is instead drawn from the edges carrying flow in a minimum-cost
    flow, so its failure actually forces a repair.
    """
    rng = np.random.default_rng(seed)
    while True:
        nv = int(rng.integers(n_vertices[0], n_vertices[1] + 1))
        ne = int(rng.integers(n_edges[0], n_edges[1] + 1))
        verts = ["s", *[f"v{k}" for k in range(1, nv - 1)], "t"]
        T = int(rng.choice(targets))
        edges = []
        for k in range(ne):
            while True:
                u = verts[int(rng.integers(0, nv - 1))]
                v = verts[int(rng.integers(1, nv))]
                if u != v:
                    break
            edges.append(
                DirectedEdge(
                    id=f"e{k}",
                    tail=u,
                    head=v,
                    capacity=float(rng.integers(1, 3 * T + 1)),
                    fixed_cost=float(rng.integers(fixed_range[0], fixed_range[1] + 1)),
                    variable_cost=float(rng.integers(variable_range[0], variable_range[1] + 1)),
                )
            )
        failable = f"e{int(rng.integers(0, ne))}"
        net = FlowNetwork(tuple(verts), tuple(edges), "s", "t", float(T), failable)
        if failable_on_optimum:
            net = _fail_used_edge(net, rng)
            if net is not None and _usable(net):
                return net
        elif not require_feasible or _usable(net):
            return net


def _fail_used_edge(net: FlowNetwork, rng: np.random.Generator) -> FlowNetwork | None:
    from .oracle import min_cost_flow_fixed_open, subset_tables

    initial, _, _ = subset_tables(net)
    if not np.isfinite(initial.min()):
        return None
    mask = int(np.argmin(initial))
    opened = [e.id for k, e in enumerate(net.edges) if (mask >> k) & 1]
    sol = min_cost_flow_fixed_open(net, opened)
    used = sorted(eid for eid, f in sol.flow.items() if f > 0)
    if not used:
        return None
    failable = used[int(rng.integers(0, len(used)))]
    return FlowNetwork(net.vertices, net.edges, net.source, net.sink, net.target, failable)


def _usable(net: FlowNetwork) -> bool:
    from .oracle import min_cost_flow_fixed_open

    everything = net.edge_ids
    full = min_cost_flow_fixed_open(net, everything)
    cut = min_cost_flow_fixed_open(net, everything, exclude_failable=True)
    if full is None or cut is None:
        return False
    w = net.edge(net.failable_edge)
    return _reachable(net, net.source, w.tail) and _reachable(net, w.head, net.sink)


def _reachable(net: FlowNetwork, a: str, b: str) -> bool:
    seen = {a}
    stack = [a]
    while stack:
        u = stack.pop()
        for e in net.edges:
            if e.tail == u and e.head not in seen:
                seen.add(e.head)
                stack.append(e.head)
    return b in seen
