"""Successive-shortest-path kernels used by the brute-force oracle.

Graphs are tiny, so Dijkstra is the O(V^2) array version; that keeps the
code inside what numba compiles.
"""

import numpy as np

from ._accel import njit

_EPS = 1e-12


def ssp_min_cost_flow(n_vertices, tails, heads, caps, costs, usable, source, sink, target):
    """Minimum variable-cost flow of value ``target`` on the usable edges.

    Costs must be nonnegative, so all potentials start at zero. Returns
    ``(feasible, cost, flow)``.
    """
    n_edges = tails.shape[0]
    flow = np.zeros(n_edges)
    pot = np.zeros(n_vertices)
    sent = 0.0
    tol = 1e-9 * max(1.0, target)
    while sent < target - tol:
        dist = np.full(n_vertices, np.inf)
        done = np.zeros(n_vertices, dtype=np.bool_)
        pred_edge = np.full(n_vertices, -1)
        pred_fwd = np.zeros(n_vertices, dtype=np.bool_)
        dist[source] = 0.0
        for _ in range(n_vertices):
            u = -1
            best = np.inf
            for v in range(n_vertices):
                if not done[v] and dist[v] < best:
                    best = dist[v]
                    u = v
            if u < 0:
                break
            done[u] = True
            for k in range(n_edges):
                if not usable[k]:
                    continue
                if tails[k] == u and caps[k] - flow[k] > _EPS:
                    v = heads[k]
                    rc = costs[k] + pot[u] - pot[v]
                    if rc < 0.0:
                        rc = 0.0
                    if dist[u] + rc < dist[v]:
                        dist[v] = dist[u] + rc
                        pred_edge[v] = k
                        pred_fwd[v] = True
                elif heads[k] == u and flow[k] > _EPS:
                    v = tails[k]
                    rc = -costs[k] + pot[u] - pot[v]
                    if rc < 0.0:
                        rc = 0.0
                    if dist[u] + rc < dist[v]:
                        dist[v] = dist[u] + rc
                        pred_edge[v] = k
                        pred_fwd[v] = False
        if dist[sink] == np.inf:
            return False, np.inf, flow
        for v in range(n_vertices):
            pot[v] += min(dist[v], dist[sink])
        push = target - sent
        v = sink
        while v != source:
            k = pred_edge[v]
            if pred_fwd[v]:
                push = min(push, caps[k] - flow[k])
                v = tails[k]
            else:
                push = min(push, flow[k])
                v = heads[k]
        v = sink
        while v != source:
            k = pred_edge[v]
            if pred_fwd[v]:
                flow[k] += push
                v = tails[k]
            else:
                flow[k] -= push
                v = heads[k]
        sent += push
    return True, float(np.sum(flow * costs)), flow


def subset_flow_costs(n_vertices, tails, heads, caps, costs, source, sink, target):
    """Minimum variable cost for every subset of usable edges (bit ``k`` = edge ``k``).

    Subsets whose capacity out of the source or into the sink is below the
    target are skipped without a shortest-path run. Infeasible entries are inf.
    """
    n_edges = tails.shape[0]
    n_sets = 1 << n_edges
    out = np.full(n_sets, np.inf)
    usable = np.zeros(n_edges, dtype=np.bool_)
    tol = 1e-9 * max(1.0, target)
    for mask in range(n_sets):
        out_cap = 0.0
        in_cap = 0.0
        for k in range(n_edges):
            on = (mask >> k) & 1 == 1
            usable[k] = on
            if on:
                if tails[k] == source:
                    out_cap += caps[k]
                if heads[k] == sink:
                    in_cap += caps[k]
        if target > tol and (out_cap < target - tol or in_cap < target - tol):
            continue
        ok, cost, _ = ssp_min_cost_flow(
            n_vertices, tails, heads, caps, costs, usable, source, sink, target
        )
        if ok:
            out[mask] = cost
    return out


ssp_min_cost_flow_py = ssp_min_cost_flow
subset_flow_costs_py = subset_flow_costs
ssp_min_cost_flow = njit(ssp_min_cost_flow)
subset_flow_costs = njit(subset_flow_costs)
