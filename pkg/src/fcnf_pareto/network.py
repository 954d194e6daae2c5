"""Fixed-charge flow networks, flow solutions and their evaluation."""

from __future__ import annotations

import json
import math
from collections import defaultdict
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any

DEFAULT_TOL = 1e-6


class NetworkError(ValueError):
    """Raised for malformed networks or solutions that reference unknown edges."""


@dataclass(frozen=True)
class DirectedEdge:
    id: str
    tail: str
    head: str
    capacity: float
    fixed_cost: float
    variable_cost: float


@dataclass(frozen=True)
class FlowNetwork:
    """Directed network with one designated edge that may fail.

    Parallel edges are allowed; every edge is addressed by its ``id``.
    """

    vertices: tuple[str, ...]
    edges: tuple[DirectedEdge, ...]
    source: str
    sink: str
    target: float
    failable_edge: str
    metadata: Mapping[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "metadata", MappingProxyType(dict(self.metadata)))
        object.__setattr__(self, "_index", {e.id: i for i, e in enumerate(self.edges)})

    def edge(self, edge_id: str) -> DirectedEdge:
        try:
            return self.edges[self._index[edge_id]]
        except KeyError:
            raise NetworkError(f"unknown edge id {edge_id!r}") from None

    def edge_index(self, edge_id: str) -> int:
        try:
            return self._index[edge_id]
        except KeyError:
            raise NetworkError(f"unknown edge id {edge_id!r}") from None

    def has_edge(self, edge_id: str) -> bool:
        return edge_id in self._index

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.edges)

    def without_edge(self, edge_id: str) -> FlowNetwork:
        """Copy of the network with ``edge_id`` removed.

        The failable designation is kept only if it still refers to an edge;
        otherwise it points at the first remaining edge so the copy stays
        structurally valid. Callers that delete the failable edge only use the
        copy as a plain FCNF instance.
        """
        edges = tuple(e for e in self.edges if e.id != edge_id)
        if not edges:
            raise NetworkError("cannot remove the only edge of a network")
        failable = self.failable_edge if self.failable_edge != edge_id else edges[0].id
        return FlowNetwork(self.vertices, edges, self.source, self.sink, self.target, failable)

    def with_target(self, target: float) -> FlowNetwork:
        return FlowNetwork(
            self.vertices, self.edges, self.source, self.sink, target,
            self.failable_edge, self.metadata,
        )


@dataclass(frozen=True)
class FlowSolution:
    """Per-edge flow plus the set of edges whose fixed charge is paid.

    An edge may be open with zero flow; that is how abandoned and failed
    edges show up in repaired solutions.
    """

    flow: Mapping[str, float]
    open: frozenset[str]
    cost: float = math.nan

    def __post_init__(self) -> None:
        object.__setattr__(self, "flow", MappingProxyType(dict(self.flow)))
        object.__setattr__(self, "open", frozenset(self.open))

    def to_dict(self) -> dict[str, Any]:
        return {
            "cost": self.cost,
            "open": sorted(self.open),
            "flow": {k: v for k, v in sorted(self.flow.items()) if v != 0.0},
        }


def make_solution(net: FlowNetwork, flow: Mapping[str, float], open_edges: Iterable[str]) -> FlowSolution:
    """Build a FlowSolution with its cost filled in."""
    sol = FlowSolution(flow, frozenset(open_edges))
    return FlowSolution(sol.flow, sol.open, flow_cost(net, sol))


def validate_network(net: FlowNetwork) -> list[str]:
    problems: list[str] = []
    verts = set(net.vertices)
    if len(verts) != len(net.vertices):
        problems.append("vertices: duplicate vertex identifiers")
    if net.source == net.sink:
        problems.append(f"source/sink: both are {net.source!r}")
    if net.source not in verts:
        problems.append(f"source: {net.source!r} is not a vertex")
    if net.sink not in verts:
        problems.append(f"sink: {net.sink!r} is not a vertex")
    if not (net.target >= 0 and math.isfinite(net.target)):
        problems.append(f"target: {net.target!r} must be a finite nonnegative number")
    seen: set[str] = set()
    for e in net.edges:
        if e.id in seen:
            problems.append(f"edge {e.id!r}: duplicate edge id")
        seen.add(e.id)
        for end in (e.tail, e.head):
            if end not in verts:
                problems.append(f"edge {e.id!r}: endpoint {end!r} is not a vertex")
        if e.tail == e.head:
            problems.append(f"edge {e.id!r}: self-loop at {e.tail!r}")
        for attr in ("capacity", "fixed_cost", "variable_cost"):
            val = getattr(e, attr)
            if not (val >= 0 and math.isfinite(val)):
                problems.append(f"edge {e.id!r}: {attr} {val!r} must be finite and >= 0")
    if sum(1 for e in net.edges if e.id == net.failable_edge) != 1:
        problems.append(f"failable_edge: {net.failable_edge!r} does not reference exactly one edge")
    return problems


def check_network(net: FlowNetwork) -> None:
    problems = validate_network(net)
    if problems:
        raise NetworkError("invalid network: " + "; ".join(problems))


def _check_refs(net: FlowNetwork, sol: FlowSolution) -> None:
    for eid in (*sol.flow, *sol.open):
        if not net.has_edge(eid):
            raise NetworkError(f"solution references unknown edge {eid!r}")


def flow_cost(net: FlowNetwork, sol: FlowSolution) -> float:
    """Fixed charges of the open edges plus variable cost of every unit of flow."""
    _check_refs(net, sol)
    fixed = sum(net.edge(eid).fixed_cost for eid in sol.open)
    variable = sum(net.edge(eid).variable_cost * f for eid, f in sol.flow.items())
    return fixed + variable


def fixed_part(net: FlowNetwork, open_edges: Iterable[str]) -> float:
    return sum(net.edge(eid).fixed_cost for eid in open_edges)


def net_outflow(net: FlowNetwork, flow: Mapping[str, float]) -> dict[str, float]:
    """Outflow minus inflow at every vertex."""
    bal: dict[str, float] = defaultdict(float)
    for v in net.vertices:
        bal[v] = 0.0
    for eid, f in flow.items():
        e = net.edge(eid)
        bal[e.tail] += f
        bal[e.head] -= f
    return dict(bal)


def is_valid_flow(
    net: FlowNetwork,
    sol: FlowSolution,
    exclude_failable: bool = False,
    tol: float = DEFAULT_TOL,
) -> bool:
    """Capacity, open-edge, conservation and target checks within ``tol``.

    The target is checked as the net outflow of the source, which equals the
    plain outflow whenever no edge enters the source.
    """
    _check_refs(net, sol)
    for eid, f in sol.flow.items():
        e = net.edge(eid)
        if f < -tol or f > e.capacity + tol:
            return False
        if f > tol and eid not in sol.open:
            return False
    bal = net_outflow(net, sol.flow)
    for v, b in bal.items():
        if v in (net.source, net.sink):
            continue
        if abs(b) > tol:
            return False
    if abs(bal[net.source] - net.target) > tol:
        return False
    if exclude_failable and abs(sol.flow.get(net.failable_edge, 0.0)) > tol:
        return False
    return True


def check_repair_pair(net: FlowNetwork, initial: FlowSolution, repaired: FlowSolution) -> bool:
    """Every edge bought for the initial flow is still paid for after repair."""
    return initial.open <= repaired.open


# -- JSON ---------------------------------------------------------------------

_NET_KEYS = {"vertices", "edges", "source", "sink", "target", "failable_edge"}
_EDGE_KEYS = {"id", "tail", "head", "capacity", "fixed_cost", "variable_cost"}


def _num(val: Any, where: str) -> float:
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise NetworkError(f"{where}: expected a number, got {val!r}")
    return float(val)


def network_from_dict(doc: Mapping[str, Any]) -> FlowNetwork:
    if not isinstance(doc, Mapping):
        raise NetworkError("network document must be a JSON object")
    extra = set(doc) - _NET_KEYS - {"metadata"}
    missing = _NET_KEYS - set(doc)
    if extra:
        raise NetworkError(f"unknown network fields: {sorted(extra)}")
    if missing:
        raise NetworkError(f"missing network fields: {sorted(missing)}")
    if not isinstance(doc["vertices"], list) or not isinstance(doc["edges"], list):
        raise NetworkError("'vertices' and 'edges' must be arrays")
    edges = []
    for k, raw in enumerate(doc["edges"]):
        if not isinstance(raw, Mapping):
            raise NetworkError(f"edges[{k}]: expected an object")
        if set(raw) != _EDGE_KEYS:
            bad = sorted(set(raw) ^ _EDGE_KEYS)
            raise NetworkError(f"edges[{k}]: unknown or missing fields {bad}")
        edges.append(
            DirectedEdge(
                id=str(raw["id"]),
                tail=str(raw["tail"]),
                head=str(raw["head"]),
                capacity=_num(raw["capacity"], f"edges[{k}].capacity"),
                fixed_cost=_num(raw["fixed_cost"], f"edges[{k}].fixed_cost"),
                variable_cost=_num(raw["variable_cost"], f"edges[{k}].variable_cost"),
            )
        )
    net = FlowNetwork(
        vertices=tuple(str(v) for v in doc["vertices"]),
        edges=tuple(edges),
        source=str(doc["source"]),
        sink=str(doc["sink"]),
        target=_num(doc["target"], "target"),
        failable_edge=str(doc["failable_edge"]),
        metadata=doc.get("metadata", {}),
    )
    check_network(net)
    return net


def network_to_dict(net: FlowNetwork) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "vertices": list(net.vertices),
        "edges": [
            {
                "id": e.id,
                "tail": e.tail,
                "head": e.head,
                "capacity": e.capacity,
                "fixed_cost": e.fixed_cost,
                "variable_cost": e.variable_cost,
            }
            for e in net.edges
        ],
        "source": net.source,
        "sink": net.sink,
        "target": net.target,
        "failable_edge": net.failable_edge,
    }
    if net.metadata:
        doc["metadata"] = dict(net.metadata)
    return doc


def load_network(path) -> FlowNetwork:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise NetworkError(f"{path}: not valid JSON ({exc})") from None
    return network_from_dict(doc)


def dump_network(net: FlowNetwork, path) -> None:
    with open(path, "w") as fh:
        json.dump(network_to_dict(net), fh, indent=2)
        fh.write("\n")
