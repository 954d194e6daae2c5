"""LP relaxation and best-bound branch-and-bound over binary variables."""

from __future__ import annotations

import heapq
import itertools
import time

import numpy as np

from . import _kernels
from .model import CompiledModel, MilpModel, MilpResult, SolverConfig, compile_model

_STATUS = {
    _kernels.OPTIMAL: "optimal",
    _kernels.INFEASIBLE: "infeasible",
    _kernels.UNBOUNDED: "unbounded",
    _kernels.ITERATION_LIMIT: "iteration-limit",
}


def _row_violation(cm: CompiledModel, x: np.ndarray) -> float:
    if cm.A.shape[0] == 0:
        return 0.0
    resid = np.abs(cm.A @ x - cm.b) / np.maximum(1.0, np.abs(cm.b))
    return float(resid.max())


def _lp(cm: CompiledModel, lo: np.ndarray, hi: np.ndarray, cfg: SolverConfig) -> tuple[str, np.ndarray | None, int]:
    """Run the kernel, retrying under Bland's rule when the answer looks off."""
    total = 0
    for bland_after in (cfg.bland_after, 0):
        code, x, pivots = _kernels.bounded_simplex(
            cm.A, cm.b, cm.c, lo, hi, cm.row_slack,
            cfg.max_lp_iterations, bland_after,
            cfg.feas_tol, cfg.opt_tol, cfg.pivot_tol,
        )
        total += pivots
        status = _STATUS[code]
        if status == "optimal":
            # clip bound residue, then confirm rows still hold
            x = np.minimum(np.maximum(x, lo), hi)
            if _row_violation(cm, x) <= 10 * cfg.feas_tol:
                return status, x, total
            continue
        if status in ("infeasible", "unbounded"):
            return status, None, total
    return "iteration-limit", None, total


def _assignment(cm: CompiledModel, x: np.ndarray) -> dict[str, float]:
    return {name: float(x[j]) for j, name in enumerate(cm.names)}


def _objective(cm: CompiledModel, x: np.ndarray) -> float:
    return float(cm.obj_sign * (cm.c @ x))


def solve_lp(model: MilpModel, config: SolverConfig | None = None) -> MilpResult:
    """Solve the continuous relaxation (binaries allowed anywhere in [0, 1])."""
    cfg = config or SolverConfig()
    cm = compile_model(model)
    t0 = time.perf_counter()
    status, x, pivots = _lp(cm, cm.lo.copy(), cm.hi.copy(), cfg)
    stats = {"nodes": 1, "pivots": pivots, "wall_time": time.perf_counter() - t0}
    if status != "optimal":
        return MilpResult(status, stats=stats)
    return MilpResult(status, _objective(cm, x), _assignment(cm, x), stats)


def _most_fractional(x: np.ndarray, binary_idx: np.ndarray, int_tol: float) -> int:
    """Column of the binary farthest from integrality; lowest index on ties."""
    best = -1
    best_dist = int_tol
    for j in binary_idx:
        frac = x[j] - np.floor(x[j])
        dist = min(frac, 1.0 - frac)
        if dist > best_dist:
            best, best_dist = int(j), dist
    return best


def _start_point(cm: CompiledModel, start: dict[str, float], lo, hi, relax) -> np.ndarray | None:
    lo2, hi2 = lo.copy(), hi.copy()
    for j in cm.binary_idx:
        name = cm.names[j]
        if name not in start:
            return None
        v = float(round(start[name]))
        if not lo[j] <= v <= hi[j]:
            return None
        lo2[j] = hi2[j] = v
    status, x = relax(lo2, hi2)
    return x if status == "optimal" else None


def solve(
    model: MilpModel,
    config: SolverConfig | None = None,
    first_feasible: bool = False,
    start: dict[str, float] | None = None,
) -> MilpResult:
    """Globally optimal solution of a mixed-binary program.

    Depth-first until an incumbent exists, then best-bound node selection;
    most-fractional branching. When the node or time limit is hit the status
    is ``iteration-limit`` and the incumbent, if any, is attached.

    With ``first_feasible`` the search stops at the first incumbent and
    returns status ``feasible``; ``stats["bound"]`` then holds the best proven
    bound on the optimum, in the model's own sense.

    ``start`` is an optional assignment used as the initial incumbent. Its
    binaries are pinned and the continuous part re-solved; a start that is
    infeasible that way is ignored.
    """
    cfg = config or SolverConfig()
    cm = compile_model(model)
    t0 = time.perf_counter()
    nodes = 0
    pivots = 0
    counter = itertools.count()

    def stats() -> dict:
        return {"nodes": nodes, "pivots": pivots, "wall_time": time.perf_counter() - t0}

    def relax(lo, hi):
        nonlocal nodes, pivots
        nodes += 1
        status, x, piv = _lp(cm, lo, hi, cfg)
        pivots += piv
        return status, x

    def polish(x, lo, hi):
        # pin binaries at their rounded values and re-solve for clean flows
        lo2, hi2 = lo.copy(), hi.copy()
        rounded = np.round(x[cm.binary_idx])
        lo2[cm.binary_idx] = rounded
        hi2[cm.binary_idx] = rounded
        status, x2 = relax(lo2, hi2)
        return x2 if status == "optimal" else None

    lo0, hi0 = cm.lo.copy(), cm.hi.copy()
    status, x = relax(lo0, hi0)
    if status != "optimal":
        return MilpResult(status, stats=stats())

    inc_x = None
    inc_val = np.inf

    def gap_tol(v):
        return 1e-9 * max(1.0, abs(v))

    # heap entries: (key, seq, val, depth, x, lo, hi); the key is (-depth, val)
    # while diving for a first incumbent and val afterwards
    heap: list = []
    diving = True

    def consider(x, lo, hi, depth):
        nonlocal inc_x, inc_val, heap, diving
        val = float(cm.c @ x)
        if val >= inc_val - gap_tol(inc_val):
            return
        if _most_fractional(x, cm.binary_idx, cfg.int_tol) < 0:
            xp = polish(x, lo, hi)
            if xp is not None:
                pval = float(cm.c @ xp)
                if pval < inc_val:
                    inc_x, inc_val = xp, pval
                    if diving:
                        diving = False
                        heap = [((e[2],), e[1]) + e[2:] for e in heap]
                        heapq.heapify(heap)
            return
        key = (-depth, val) if diving else (val,)
        heapq.heappush(heap, (key, next(counter), val, depth, x, lo, hi))

    if start is not None:
        xs = _start_point(cm, start, lo0, hi0, relax)
        if xs is not None:
            inc_x, inc_val = xs, float(cm.c @ xs)
            diving = False

    consider(x, lo0, hi0, 0)
    limited = False
    stopped = False
    while heap:
        if first_feasible and inc_x is not None:
            stopped = True
            break
        _, _, val, depth, x, lo, hi = heapq.heappop(heap)
        if val >= inc_val - gap_tol(inc_val):
            if diving:
                continue
            break
        if nodes >= cfg.node_limit or (
            cfg.time_limit is not None and time.perf_counter() - t0 > cfg.time_limit
        ):
            limited = True
            break
        j = _most_fractional(x, cm.binary_idx, cfg.int_tol)
        for v in (0.0, 1.0):
            lo_c, hi_c = lo.copy(), hi.copy()
            lo_c[j] = hi_c[j] = v
            st, xc = relax(lo_c, hi_c)
            if st == "optimal":
                consider(xc, lo_c, hi_c, depth + 1)
            elif st == "iteration-limit":
                limited = True

    if stopped and not limited:
        bound = min([inc_val] + [e[2] for e in heap])
        st = stats()
        st["bound"] = float(cm.obj_sign * bound)
        return MilpResult("feasible", _objective(cm, inc_x), _assignment(cm, inc_x), st)
    if limited:
        if inc_x is None:
            return MilpResult("iteration-limit", stats=stats())
        return MilpResult("iteration-limit", _objective(cm, inc_x), _assignment(cm, inc_x), stats())
    if inc_x is None:
        return MilpResult("infeasible", stats=stats())
    return MilpResult("optimal", _objective(cm, inc_x), _assignment(cm, inc_x), stats())
