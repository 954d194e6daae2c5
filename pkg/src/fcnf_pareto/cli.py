"""Command-line entry point.

Subcommands::

    solve   optimal fixed-charge flow for a network JSON file
    pareto  initial-cost / repaired-cost front for a network JSON file
    reduce  capture-and-storage instance (CID JSON) to network JSON
    verify  cross-check a front against exhaustive enumeration
    gen     write a seeded synthetic instance

Exit codes (stable):

    0  success
    1  I/O error (missing file, unwritable output)
    2  usage, parse or validation error in the input
    3  target flow cannot be routed (infeasible)
    4  no repair exists once the failable edge is removed
    5  solver node or time limit reached
    6  verification found a failing invariant
    7  instance too large for the exhaustive oracle
    8  internal inconsistency between solver steps
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from . import ccs, formulation as fm
from .generators import random_network
from .milp import SolverConfig, export_lp, solve
from .network import (
    FlowNetwork,
    NetworkError,
    check_repair_pair,
    is_valid_flow,
    make_solution,
    network_from_dict,
    network_to_dict,
)
from .oracle import DEFAULT_EDGE_CAP, OracleRefusal, brute_force_front
from .pareto import (
    InconsistencyError,
    NoFlowError,
    NoRepairError,
    ParetoFront,
    SolverLimitError,
    pareto_front,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_NO_REPAIR = 4
EXIT_LIMIT = 5
EXIT_VERIFY_FAILED = 6
EXIT_REFUSED = 7
EXIT_INCONSISTENT = 8

LOCKED_EDGES_KEY = "locked_edges"
COST_TOL = 1e-6

log = logging.getLogger("fcnf_pareto")


class CliError(Exception):
    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: Path | None = None
    output: Path | None = None
    format: str = "json"
    csv: Path | None = None
    epsilon: float | None = None
    solver: SolverConfig = SolverConfig()
    seed: int = 0
    lock_capture: bool = False
    export_lp: Path | None = None
    literal_step2: bool = False
    check_file: Path | None = None
    max_edges: int = DEFAULT_EDGE_CAP
    kind: str = "network"

    def __post_init__(self) -> None:
        if self.epsilon is not None and not self.epsilon > 0:
            raise CliError("--epsilon must be positive", EXIT_USAGE)
        if self.format not in ("json", "csv"):
            raise CliError(f"unknown format {self.format!r}", EXIT_USAGE)


# -- I/O helpers ----------------------------------------------------------------

def _read_json(path: Path | None) -> Any:
    if path is None:
        raise CliError("--input is required", EXIT_USAGE)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_IO) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: not valid JSON ({exc})", EXIT_USAGE) from None


def _write(path: Path | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        path.write_text(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}", EXIT_IO) from None


def _dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _load_network(path: Path | None) -> FlowNetwork:
    doc = _read_json(path)
    try:
        return network_from_dict(doc)
    except (NetworkError, KeyError, TypeError, ValueError) as exc:
        raise CliError(f"{path}: {exc}", EXIT_USAGE) from None


def _say(cfg: RunConfig, line: str) -> None:
    # keep stdout clean when the payload itself goes there
    stream = sys.stdout if cfg.output is not None else sys.stderr
    print(line, file=stream)


def _paired_options(cfg: RunConfig, net: FlowNetwork) -> fm.PairedModelOptions | None:
    if not cfg.lock_capture:
        return None
    locked = net.metadata.get(LOCKED_EDGES_KEY) if net.metadata else None
    if not locked:
        raise CliError(
            f"--lock-capture needs metadata.{LOCKED_EDGES_KEY} in the network "
            "(write it with `reduce --lock-capture`)",
            EXIT_USAGE,
        )
    missing = [e for e in locked if not net.has_edge(e)]
    if missing:
        raise CliError(f"locked edges not in network: {missing}", EXIT_USAGE)
    return fm.PairedModelOptions(lock_source_flows=True, locked_edges=frozenset(locked))


# -- subcommands -------------------------------------------------------------------

def cmd_solve(cfg: RunConfig) -> int:
    net = _load_network(cfg.input)
    model = fm.base_fcnf_model(net)
    if cfg.export_lp is not None:
        _write(cfg.export_lp, export_lp(model))
    res = solve(model, cfg.solver)
    if res.status == "infeasible":
        raise CliError("target flow cannot be routed through the network", EXIT_INFEASIBLE)
    if res.status != "optimal":
        raise CliError(f"solver stopped: {res.status}", EXIT_LIMIT)
    sol = fm.extract_flow(net, res.assignment, "y", "f")
    _write(cfg.output, _dumps(sol.to_dict()))
    _say(cfg, f"objective {sol.cost:.6f}")
    return EXIT_OK


def _front(cfg: RunConfig, net: FlowNetwork) -> ParetoFront:
    opts = _paired_options(cfg, net)
    if cfg.export_lp is not None:
        _write(cfg.export_lp, export_lp(fm.paired_model(net, opts)))
    return pareto_front(
        net, opts, epsilon=cfg.epsilon, config=cfg.solver, relaxed_step2=not cfg.literal_step2
    )


def cmd_pareto(cfg: RunConfig) -> int:
    net = _load_network(cfg.input)
    front = _front(cfg, net)
    text = front.to_json() if cfg.format == "json" else front.to_csv()
    _write(cfg.output, text)
    if cfg.csv is not None:
        _write(cfg.csv, front.to_csv())
    first, last = front.points[0], front.points[-1]
    _say(cfg, f"points {len(front.points)}")
    _say(cfg, f"first initial={first.initial_cost:.6f} repaired={first.repaired_cost:.6f}")
    _say(cfg, f"last initial={last.initial_cost:.6f} repaired={last.repaired_cost:.6f}")
    return EXIT_OK


def cmd_reduce(cfg: RunConfig) -> int:
    doc = _read_json(cfg.input)
    try:
        cid = ccs.annualize_costs(ccs.cid_from_dict(doc))
        net = ccs.reduce_cid_to_fcnf(cid)
    except (ccs.CidError, NetworkError) as exc:
        raise CliError(f"{cfg.input}: {exc}", EXIT_USAGE) from None
    out = network_to_dict(net)
    if cfg.lock_capture:
        meta = dict(out.get("metadata", {}))
        meta[LOCKED_EDGES_KEY] = sorted(ccs.capture_edges(cid))
        out["metadata"] = meta
    _write(cfg.output, _dumps(out))
    _say(cfg, f"vertices {len(net.vertices)} edges {len(net.edges)} failable {net.failable_edge}")
    return EXIT_OK


def _read_front_costs(path: Path) -> tuple[list[tuple[float, float]], list[dict] | None]:
    """(initial, repaired) pairs from a front file, plus flows when it is JSON."""
    try:
        text = path.read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_IO) from None
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
            pts = doc["points"]
            return [(float(p["initial_cost"]), float(p["repaired_cost"])) for p in pts], pts
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise CliError(f"{path}: not a front file ({exc})", EXIT_USAGE) from None
    try:
        rows = list(csv.DictReader(io.StringIO(text)))
        return [(float(r["initial_cost"]), float(r["repaired_cost"])) for r in rows], None
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"{path}: not a front file ({exc})", EXIT_USAGE) from None


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= COST_TOL * max(1.0, abs(a), abs(b))


def front_checks(
    net: FlowNetwork,
    costs: list[tuple[float, float]],
    oracle_costs: list[tuple[float, float]],
    epsilon: float,
    points: list[dict] | None = None,
) -> list[tuple[str, bool]]:
    """Named pass/fail results for a front against the oracle's front."""
    checks: list[tuple[str, bool]] = []
    checks.append(("non-empty", bool(costs)))
    same = len(costs) == len(oracle_costs) and all(
        _close(a[0], b[0]) and _close(a[1], b[1]) for a, b in zip(costs, oracle_costs)
    )
    checks.append(("oracle-equivalence", same))
    if costs and oracle_costs:
        checks.append(("initial-endpoint", _close(costs[0][0], oracle_costs[0][0])))
        checks.append((
            "terminal-endpoint",
            _close(costs[-1][0], oracle_costs[-1][0]) and _close(costs[-1][1], oracle_costs[-1][1]),
        ))
    steps = list(zip(costs, costs[1:]))
    checks.append(("repaired-decreasing", all(b[1] <= a[1] - epsilon * (1 - 1e-9) for a, b in steps)))
    checks.append(("initial-nondecreasing", all(b[0] >= a[0] - COST_TOL * max(1.0, abs(a[0])) for a, b in steps)))
    if points is not None:
        ok = True
        for p in points:
            try:
                init = _solution(net, p["initial"])
                rep = _solution(net, p["repaired"])
            except (KeyError, TypeError, ValueError, NetworkError):
                ok = False
                break
            if not (is_valid_flow(net, init) and check_repair_pair(net, init, rep)):
                ok = False
                break
        checks.append(("valid-flows", ok))
    return checks


def _solution(net: FlowNetwork, doc: dict):
    return make_solution(net, {k: float(v) for k, v in doc["flow"].items()}, doc["open"])


def cmd_verify(cfg: RunConfig) -> int:
    net = _load_network(cfg.input)
    try:
        oracle = brute_force_front(net, max_edges=cfg.max_edges)
    except OracleRefusal as exc:
        raise CliError(str(exc), EXIT_REFUSED) from None
    oracle_costs = oracle.costs()
    if cfg.check_file is not None:
        costs, points = _read_front_costs(cfg.check_file)
        epsilon = cfg.epsilon if cfg.epsilon is not None else 0.0
    else:
        eps = cfg.epsilon
        if eps is None:
            gap = oracle.min_repaired_gap()
            eps = min(gap / 2, 1e-3) if gap != float("inf") else 1e-3
        front = pareto_front(
            net, _paired_options(cfg, net), epsilon=eps, config=cfg.solver,
            relaxed_step2=not cfg.literal_step2,
        )
        costs = front.costs()
        points = front.to_dict()["points"]
        epsilon = front.epsilon
    checks = front_checks(net, costs, oracle_costs, epsilon, points)
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_VERIFY_FAILED


def cmd_gen(cfg: RunConfig) -> int:
    if cfg.kind == "network":
        doc = network_to_dict(random_network(cfg.seed))
    elif cfg.kind == "cid":
        doc = ccs.cid_to_dict(ccs.random_cid(cfg.seed))
    elif cfg.kind == "nevada-like":
        doc = ccs.cid_to_dict(ccs.nevada_like(cfg.seed))
    else:
        raise CliError(f"unknown kind {cfg.kind!r}", EXIT_USAGE)
    _write(cfg.output, _dumps(doc))
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "pareto": cmd_pareto,
    "reduce": cmd_reduce,
    "verify": cmd_verify,
    "gen": cmd_gen,
}


# -- argument parsing ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fcnf-pareto",
        description="Fixed-charge flow planning against the failure of one designated edge.",
        epilog="Exit codes: 0 ok, 1 I/O, 2 usage/parse, 3 infeasible, 4 no repair, "
        "5 solver limit, 6 verify failed, 7 oracle refused, 8 internal inconsistency.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, solver: bool = True) -> None:
        p.add_argument("--input", type=Path, help="input JSON file")
        p.add_argument("--output", type=Path, help="output file (default: stdout)")
        if solver:
            p.add_argument("--node-limit", type=int, help="branch-and-bound node limit per MILP")
            p.add_argument("--time-limit", type=float, help="wall-clock limit per MILP, seconds")
            p.add_argument("--config", type=Path, help="JSON file of solver settings")

    p = sub.add_parser("solve", help="optimal fixed-charge flow")
    common(p)
    p.add_argument("--export-lp", type=Path, help="also write the model in LP format")

    p = sub.add_parser("pareto", help="initial-cost / repaired-cost front")
    common(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--csv", type=Path, help="also write the iteration/cost table as CSV")
    p.add_argument("--epsilon", type=float, help="minimum repaired-cost step (absolute)")
    p.add_argument("--lock-capture", action="store_true", help="hold locked edge flows across the failure")
    p.add_argument("--export-lp", type=Path, help="write the paired model in LP format")
    p.add_argument("--literal-step2", action="store_true",
                   help="hold the repaired cost at exactly the step-1 value in step 2")

    p = sub.add_parser("reduce", help="capture-and-storage instance to network JSON")
    common(p, solver=False)
    p.add_argument("--lock-capture", action="store_true", help="record capture edges as locked")

    p = sub.add_parser("verify", help="cross-check a front against exhaustive enumeration")
    common(p)
    p.add_argument("--epsilon", type=float, help="step size (default: half the oracle's smallest gap)")
    p.add_argument("--check-file", type=Path, help="check this front file (JSON or CSV) instead of solving")
    p.add_argument("--lock-capture", action="store_true")
    p.add_argument("--literal-step2", action="store_true")
    p.add_argument("--max-edges", type=int, default=DEFAULT_EDGE_CAP, help="oracle size cap")

    p = sub.add_parser("gen", help="write a seeded synthetic instance")
    p.add_argument("--kind", choices=("network", "cid", "nevada-like"), default="network")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", type=Path, help="output file (default: stdout)")
    return parser


def _solver_config(args: argparse.Namespace) -> SolverConfig:
    doc: dict[str, Any] = {}
    if getattr(args, "config", None) is not None:
        doc = _read_json(args.config)
        if not isinstance(doc, dict):
            raise CliError(f"{args.config}: expected a JSON object", EXIT_USAGE)
    if getattr(args, "node_limit", None) is not None:
        doc["node_limit"] = args.node_limit
    if getattr(args, "time_limit", None) is not None:
        doc["time_limit"] = args.time_limit
    try:
        return SolverConfig.from_dict(doc)
    except (TypeError, ValueError) as exc:
        raise CliError(f"solver settings: {exc}", EXIT_USAGE) from None


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        input=getattr(args, "input", None),
        output=getattr(args, "output", None),
        format=getattr(args, "format", "json"),
        csv=getattr(args, "csv", None),
        epsilon=getattr(args, "epsilon", None),
        solver=_solver_config(args),
        seed=getattr(args, "seed", 0),
        lock_capture=getattr(args, "lock_capture", False),
        export_lp=getattr(args, "export_lp", None),
        literal_step2=getattr(args, "literal_step2", False),
        check_file=getattr(args, "check_file", None),
        max_edges=getattr(args, "max_edges", DEFAULT_EDGE_CAP),
        kind=getattr(args, "kind", "network"),
    )


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except NoFlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NoRepairError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_REPAIR
    except SolverLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except InconsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (NetworkError, ccs.CidError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
