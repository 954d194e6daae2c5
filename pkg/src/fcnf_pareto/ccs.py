"""Capture-and-storage infrastructure instances and their reduction to FCNF.

A CID instance has capacitated, costed sources and sinks joined by candidate
pipelines. The reduction adds a super source with one edge into every
capture site and a super sink with one edge out of every storage site; those
edges carry the site's capacity and costs. Failure of a storage site becomes
failure of its super-sink edge.
"""

from __future__ import annotations

import json
import math
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .formulation import PairedModelOptions
from .network import DirectedEdge, FlowNetwork, check_network

SUPER_SOURCE = "__source__"
SUPER_SINK = "__sink__"


class CidError(ValueError):
    pass


@dataclass(frozen=True)
class Site:
    id: str
    capacity: float
    fixed_cost: float
    variable_cost: float


@dataclass(frozen=True)
class Pipe:
    id: str
    tail: str
    head: str
    capacity: float
    fixed_cost: float
    variable_cost: float


@dataclass(frozen=True)
class CidInstance:
    sources: tuple[Site, ...]
    sinks: tuple[Site, ...]
    junctions: tuple[str, ...]
    pipes: tuple[Pipe, ...]
    target: float
    failable_sink: str
    project_years: int = 1
    name: str = ""
    synthetic: bool = False
    coordinates: Mapping[str, tuple[float, float]] = field(default_factory=dict)

    def vertex_ids(self) -> list[str]:
        return [s.id for s in self.sources] + [s.id for s in self.sinks] + list(self.junctions)


def capture_edge_id(source_id: str) -> str:
    return f"capture:{source_id}"


def storage_edge_id(sink_id: str) -> str:
    return f"storage:{sink_id}"


# -- parsing ------------------------------------------------------------------

_TOP = {"sources", "sinks", "junctions", "pipes", "target", "failable_sink", "project_years"}
_OPTIONAL = {"name", "synthetic", "coordinates"}
_SITE = {"id", "capacity", "fixed_cost", "variable_cost"}
_PIPE = {"id", "tail", "head", "capacity", "fixed_cost", "variable_cost"}


def _number(val: Any, where: str, minimum: float = 0.0) -> float:
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise CidError(f"{where}: expected a finite number, got {val!r}")
    if val < minimum:
        raise CidError(f"{where}: must be >= {minimum}, got {val!r}")
    return float(val)


def _fields(obj: Any, keys: set[str], where: str) -> None:
    if not isinstance(obj, Mapping):
        raise CidError(f"{where}: expected an object")
    extra, missing = set(obj) - keys, keys - set(obj)
    if extra:
        raise CidError(f"{where}: unknown fields {sorted(extra)}")
    if missing:
        raise CidError(f"{where}: missing fields {sorted(missing)}")


def cid_from_dict(doc: Mapping[str, Any]) -> CidInstance:
    if not isinstance(doc, Mapping):
        raise CidError("CID document must be a JSON object")
    extra = set(doc) - _TOP - _OPTIONAL
    if extra:
        raise CidError(f"unknown top-level fields {sorted(extra)}")
    missing = _TOP - set(doc)
    if missing:
        raise CidError(f"missing top-level fields {sorted(missing)}")

    def sites(key: str) -> tuple[Site, ...]:
        if not isinstance(doc[key], list):
            raise CidError(f"{key}: expected an array")
        out = []
        for k, raw in enumerate(doc[key]):
            where = f"{key}[{k}]"
            _fields(raw, _SITE, where)
            out.append(Site(
                str(raw["id"]),
                _number(raw["capacity"], f"{where}.capacity"),
                _number(raw["fixed_cost"], f"{where}.fixed_cost"),
                _number(raw["variable_cost"], f"{where}.variable_cost"),
            ))
        return tuple(out)

    sources, sinks = sites("sources"), sites("sinks")
    if not isinstance(doc["junctions"], list) or not all(isinstance(j, str) for j in doc["junctions"]):
        raise CidError("junctions: expected an array of strings")
    if not isinstance(doc["pipes"], list):
        raise CidError("pipes: expected an array")
    pipes = []
    for k, raw in enumerate(doc["pipes"]):
        where = f"pipes[{k}]"
        _fields(raw, _PIPE, where)
        pipes.append(Pipe(
            str(raw["id"]), str(raw["tail"]), str(raw["head"]),
            _number(raw["capacity"], f"{where}.capacity"),
            _number(raw["fixed_cost"], f"{where}.fixed_cost"),
            _number(raw["variable_cost"], f"{where}.variable_cost"),
        ))
    years = doc["project_years"]
    if isinstance(years, bool) or not isinstance(years, int) or years < 1:
        raise CidError(f"project_years: expected a positive integer, got {years!r}")
    coords = doc.get("coordinates", {})
    if not isinstance(coords, Mapping):
        raise CidError("coordinates: expected an object")
    cid = CidInstance(
        sources=sources,
        sinks=sinks,
        junctions=tuple(doc["junctions"]),
        pipes=tuple(pipes),
        target=_number(doc["target"], "target"),
        failable_sink=str(doc["failable_sink"]),
        project_years=years,
        name=str(doc.get("name", "")),
        synthetic=bool(doc.get("synthetic", False)),
        coordinates={str(k): tuple(v) for k, v in coords.items()},
    )
    check_cid(cid)
    return cid


def check_cid(cid: CidInstance) -> None:
    ids = cid.vertex_ids()
    dupes = sorted({v for v in ids if ids.count(v) > 1})
    if dupes:
        raise CidError(f"vertex ids used more than once: {dupes}")
    if SUPER_SOURCE in ids or SUPER_SINK in ids:
        raise CidError(f"vertex ids {SUPER_SOURCE!r} and {SUPER_SINK!r} are reserved")
    known = set(ids)
    pipe_ids = [p.id for p in cid.pipes]
    if len(set(pipe_ids)) != len(pipe_ids):
        raise CidError("pipe ids must be unique")
    for p in cid.pipes:
        for end in (p.tail, p.head):
            if end not in known:
                raise CidError(f"pipe {p.id!r}: endpoint {end!r} is not a declared vertex")
        if p.tail == p.head:
            raise CidError(f"pipe {p.id!r}: self-loop")
        if p.id.startswith(("capture:", "storage:")):
            raise CidError(f"pipe {p.id!r}: ids starting with capture:/storage: are reserved")
    if cid.failable_sink not in {s.id for s in cid.sinks}:
        raise CidError(f"failable_sink: {cid.failable_sink!r} is not a declared sink")
    if not cid.sources or not cid.sinks:
        raise CidError("need at least one source and one sink")
    if sum(s.capacity for s in cid.sources) < cid.target:
        raise CidError("infeasible: total source capacity is below the target")
    if sum(s.capacity for s in cid.sinks) < cid.target:
        raise CidError("infeasible: total sink capacity is below the target")


def parse_cid(text: str) -> CidInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CidError(f"not valid JSON: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return cid_from_dict(doc)


def cid_to_dict(cid: CidInstance) -> dict[str, Any]:
    def site(s: Site) -> dict[str, Any]:
        return {"id": s.id, "capacity": s.capacity, "fixed_cost": s.fixed_cost, "variable_cost": s.variable_cost}

    doc: dict[str, Any] = {}
    if cid.name:
        doc["name"] = cid.name
    if cid.synthetic:
        doc["synthetic"] = True
    doc.update({
        "sources": [site(s) for s in cid.sources],
        "sinks": [site(s) for s in cid.sinks],
        "junctions": list(cid.junctions),
        "pipes": [
            {"id": p.id, "tail": p.tail, "head": p.head, "capacity": p.capacity,
             "fixed_cost": p.fixed_cost, "variable_cost": p.variable_cost}
            for p in cid.pipes
        ],
        "target": cid.target,
        "failable_sink": cid.failable_sink,
        "project_years": cid.project_years,
    })
    if cid.coordinates:
        doc["coordinates"] = {k: list(v) for k, v in cid.coordinates.items()}
    return doc


# -- transformations ----------------------------------------------------------

def reduce_cid_to_fcnf(cid: CidInstance) -> FlowNetwork:
    check_cid(cid)
    edges = [
        DirectedEdge(capture_edge_id(s.id), SUPER_SOURCE, s.id, s.capacity, s.fixed_cost, s.variable_cost)
        for s in cid.sources
    ]
    edges += [
        DirectedEdge(p.id, p.tail, p.head, p.capacity, p.fixed_cost, p.variable_cost)
        for p in cid.pipes
    ]
    edges += [
        DirectedEdge(storage_edge_id(s.id), s.id, SUPER_SINK, s.capacity, s.fixed_cost, s.variable_cost)
        for s in cid.sinks
    ]
    metadata: dict[str, Any] = {}
    if cid.coordinates:
        metadata["coordinates"] = {k: list(v) for k, v in cid.coordinates.items()}
    if cid.synthetic:
        metadata["synthetic"] = True
    net = FlowNetwork(
        vertices=(SUPER_SOURCE, *cid.vertex_ids(), SUPER_SINK),
        edges=tuple(edges),
        source=SUPER_SOURCE,
        sink=SUPER_SINK,
        target=cid.target,
        failable_edge=storage_edge_id(cid.failable_sink),
        metadata=metadata,
    )
    check_network(net)
    return net


def capture_edges(cid: CidInstance) -> frozenset[str]:
    return frozenset(capture_edge_id(s.id) for s in cid.sources)


def capture_lock_options(cid: CidInstance) -> PairedModelOptions:
    """Options that hold each source's captured amount fixed across the failure."""
    return PairedModelOptions(lock_source_flows=True, locked_edges=capture_edges(cid))


def annualize_costs(cid: CidInstance) -> CidInstance:
    """Scale per-unit costs by the project length; fixed costs are untouched.

    Flows stay annual rates, so the cost of a solved flow is the whole
    project's cost.
    """
    if cid.project_years < 1:
        raise CidError("project_years must be >= 1")
    k = float(cid.project_years)
    return replace(
        cid,
        sources=tuple(replace(s, variable_cost=s.variable_cost * k) for s in cid.sources),
        sinks=tuple(replace(s, variable_cost=s.variable_cost * k) for s in cid.sinks),
        pipes=tuple(replace(p, variable_cost=p.variable_cost * k) for p in cid.pipes),
    )


# -- generators -----------------------------------------------------------------

def random_cid(
    seed: int | np.random.Generator,
    n_sources: int = 2,
    n_sinks: int = 2,
    n_junctions: int = 1,
    n_pipes: int = 4,
) -> CidInstance:
    """Small random instance for property tests; always feasible without the failable sink."""
    rng = np.random.default_rng(seed)
    while True:
        srcs = tuple(
            Site(f"src{k}", float(rng.integers(1, 4)), float(rng.integers(0, 6)), float(rng.integers(0, 4)))
            for k in range(n_sources)
        )
        snks = tuple(
            Site(f"snk{k}", float(rng.integers(1, 4)), float(rng.integers(1, 8)), float(rng.integers(0, 3)))
            for k in range(n_sinks)
        )
        juncs = tuple(f"j{k}" for k in range(n_junctions))
        tails = [s.id for s in srcs] + list(juncs)
        heads = list(juncs) + [s.id for s in snks]
        pipes = []
        for k in range(n_pipes):
            while True:
                u = tails[int(rng.integers(0, len(tails)))]
                v = heads[int(rng.integers(0, len(heads)))]
                if u != v:
                    break
            pipes.append(Pipe(f"p{k}", u, v, float(rng.integers(1, 5)), float(rng.integers(1, 10)), float(rng.integers(0, 4))))
        target = float(rng.integers(1, 3))
        failable = snks[int(rng.integers(0, n_sinks))].id
        if sum(s.capacity for s in srcs) < target:
            continue
        if sum(s.capacity for s in snks if s.id != failable) < target:
            continue
        cid = CidInstance(srcs, snks, juncs, tuple(pipes), target, failable)
        from .oracle import min_cost_flow_fixed_open

        net = reduce_cid_to_fcnf(cid)
        if min_cost_flow_fixed_open(net, net.edge_ids, exclude_failable=True) is not None:
            return cid


def nevada_like(seed: int = 0, target: float = 8.0, project_years: int = 20) -> CidInstance:
    """Synthetic stand-in with the published instance's shape: 21 sources, 3 sinks.

    Units are Mt CO2 per year and $M. Sources carry no fixed retrofit cost
    and all sinks share the same storage costs. Sink ``snk2`` is placed
    southernmost and designated failable. The numbers are invented; the
    output is labelled synthetic.
    """
    rng = np.random.default_rng(seed)
    coords: dict[str, tuple[float, float]] = {}
    # three clusters of emitters around hubs on a north-south corridor
    hubs = [("h0", (0.0, 300.0)), ("h1", (40.0, 150.0)), ("h2", (10.0, 0.0))]
    for hid, xy in hubs:
        coords[hid] = xy
    shares = rng.dirichlet(np.ones(21)) * 15.92
    sources = []
    pipes = []
    for k in range(21):
        hid, (hx, hy) = hubs[k % 3]
        sid = f"src{k + 1}"
        xy = (hx + float(rng.normal(0, 30)), hy + float(rng.normal(0, 30)))
        coords[sid] = xy
        cap = round(float(max(shares[k], 0.05)), 3)
        sources.append(Site(sid, cap, 0.0, round(float(rng.uniform(20.0, 80.0)), 2)))
        length = math.dist(xy, (hx, hy))
        pipes.append(Pipe(f"p_{sid}", sid, hid, cap, round(0.9 * length + 5.0, 2), round(0.002 * length, 4)))
    sink_xy = {"snk1": (60.0, 340.0), "snk2": (0.0, -80.0), "snk3": (90.0, 180.0)}
    sinks = [Site(sid, cap, 60.0, 8.0) for sid, cap in zip(sink_xy, (9.0, 6.0, 7.0))]
    coords.update(sink_xy)
    trunk = [("h0", "h1"), ("h1", "h2")]
    links = trunk + [(b, a) for a, b in trunk] + [("h0", "snk1"), ("h1", "snk3"), ("h2", "snk2"), ("h2", "snk3")]
    for a, b in links:
        length = math.dist(coords[a], coords[b])
        pipes.append(Pipe(f"p_{a}_{b}", a, b, 12.0, round(1.2 * length + 10.0, 2), round(0.001 * length, 4)))
    return CidInstance(
        sources=tuple(sources),
        sinks=tuple(sinks),
        junctions=tuple(h for h, _ in hubs),
        pipes=tuple(pipes),
        target=target,
        failable_sink="snk2",
        project_years=project_years,
        name=f"nevada-like synthetic (seed {seed})",
        synthetic=True,
        coordinates=coords,
    )
