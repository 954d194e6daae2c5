"""Build the bundled demo instance and its golden front.

The instance is a constructed stand-in with a known shape: unit capacities,
fixed costs only, a target of one unit, and failable edge (b, t). A seeded
search draws random fixed costs and extra edges until

* the unique cheapest s-t flow is the path s-b-t, costing 9,
* the cheapest repair of that flow after (b, t) fails costs 20, and
* the exhaustive oracle finds exactly four non-dominated
  (initial cost, repaired cost) pairs.

Candidates are screened with a quick path-based estimate (with one unit to
route over unit-capacity edges and no variable costs, every flow worth
considering is a simple path). Survivors are confirmed by the exhaustive
oracle, and every golden number comes from the oracle; nothing is typed in
by hand.

    python3 scripts/make_demo_goldens.py [--seed N] [--out-dir DIR]
"""

from __future__ import annotations

import argparse
import itertools
import json
from pathlib import Path

import numpy as np

from fcnf_pareto.network import DirectedEdge, FlowNetwork, make_solution, network_to_dict
from fcnf_pareto.oracle import brute_force_front, optimal_repair_cost, subset_tables

VERTICES = ("s", "a", "b", "c", "d", "t")
PATH_COST = 9.0
REPAIR_COST = 20.0
FRONT_SIZE = 4
DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "fcnf_pareto" / "data"


def _candidate(rng: np.random.Generator) -> FlowNetwork:
    # s-b-t is always present; its split of the cost 9 is random
    sb = int(rng.integers(1, 9))
    edges = [("s", "b", sb), ("b", "t", int(PATH_COST) - sb)]
    pairs = [
        (u, v) for u, v in itertools.permutations(VERTICES, 2)
        if u != "t" and v != "s" and (u, v) not in {("s", "b"), ("b", "t"), ("s", "t")}
    ]
    n_extra = int(rng.integers(5, 10))
    for k in rng.choice(len(pairs), size=n_extra, replace=False):
        u, v = pairs[int(k)]
        edges.append((u, v, int(rng.integers(1, 6))))
    return FlowNetwork(
        vertices=VERTICES,
        edges=tuple(
            DirectedEdge(f"({u},{v})", u, v, 1.0, float(f), 0.0) for u, v, f in edges
        ),
        source="s",
        sink="t",
        target=1.0,
        failable_edge="(b,t)",
    )


def _paths(net: FlowNetwork) -> list[frozenset[str]]:
    out: list[frozenset[str]] = []

    def walk(v: str, seen: set[str], used: list[str]) -> None:
        if v == net.sink:
            out.append(frozenset(used))
            return
        for e in net.edges:
            if e.tail == v and e.head not in seen:
                walk(e.head, seen | {e.head}, used + [e.id])

    walk(net.source, {net.source}, [])
    return out


def _quick_front_size(net: FlowNetwork) -> int:
    fixed = {e.id: e.fixed_cost for e in net.edges}
    paths = _paths(net)
    backups = [q for q in paths if net.failable_edge not in q]
    if not backups:
        return 0
    pairs = []
    for p in paths:
        cost = sum(fixed[e] for e in p)
        repair = min(sum(fixed[e] for e in p | q) for q in backups)
        pairs.append((cost, repair))
    pairs.sort()
    kept, best = 0, float("inf")
    for _, r in pairs:
        if r < best - 1e-9:
            kept += 1
            best = r
    return kept


def _matches(net: FlowNetwork) -> bool:
    if _quick_front_size(net) != FRONT_SIZE:
        return False
    initial, _, _ = subset_tables(net)
    best = float(initial.min())
    if abs(best - PATH_COST) > 1e-9:
        return False
    # the s-b-t path must be the only open set reaching the optimum
    if int(np.sum(np.abs(initial - best) <= 1e-9)) != 1:
        return False
    path = make_solution(net, {"(s,b)": 1.0, "(b,t)": 1.0}, {"(s,b)", "(b,t)"})
    repair = optimal_repair_cost(net, path)
    if repair is None or abs(repair - REPAIR_COST) > 1e-9:
        return False
    return len(brute_force_front(net).pairs) == FRONT_SIZE


def search(seed: int, max_tries: int = 5_000_000) -> tuple[FlowNetwork, int]:
    rng = np.random.default_rng(seed)
    for tries in range(1, max_tries + 1):
        net = _candidate(rng)
        if _matches(net):
            return net, tries
    raise SystemExit(f"no matching instance in {max_tries} draws from seed {seed}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=6)
    parser.add_argument("--out-dir", type=Path, default=DATA_DIR)
    args = parser.parse_args()

    net, tries = search(args.seed)
    front = brute_force_front(net)
    doc = network_to_dict(net)
    doc["metadata"] = {"name": "demo: four-point front", "generator_seed": args.seed}
    goldens = {
        "generator": "scripts/make_demo_goldens.py",
        "seed": args.seed,
        "draws": tries,
        "base_cost": front.pairs[0].initial_cost,
        "first_repair_cost": front.pairs[0].repaired_cost,
        "terminal_cost": front.pairs[-1].repaired_cost,
        "front": [
            {
                "initial_cost": p.initial_cost,
                "repaired_cost": p.repaired_cost,
                "initial_open": sorted(p.initial_open),
            }
            for p in front.pairs
        ],
    }
    args.out_dir.mkdir(parents=True, exist_ok=True)
    (args.out_dir / "demo_network.json").write_text(json.dumps(doc, indent=2) + "\n")
    (args.out_dir / "demo_goldens.json").write_text(json.dumps(goldens, indent=2) + "\n")
    print(f"found after {tries} draws; front {[(p.initial_cost, p.repaired_cost) for p in front.pairs]}")


if __name__ == "__main__":
    main()
