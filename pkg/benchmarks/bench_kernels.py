"""Compare the numba-compiled kernels against the plain numpy path.

Kernel timings call both versions of each kernel in one process. The
end-to-end timings run a full front in subprocesses with
``FCNF_PARETO_NUMBA`` set to 1 and 0, so they include import and compile
time for the compiled path.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--edges 14] [--seed 1]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from fcnf_pareto import _flowkernels
from fcnf_pareto import formulation as fm
from fcnf_pareto._accel import force_njit
from fcnf_pareto.generators import random_network
from fcnf_pareto.milp import SolverConfig
from fcnf_pareto.milp import _kernels
from fcnf_pareto.milp.model import compile_model

END_TO_END = """
import sys, time
from fcnf_pareto.generators import random_network
from fcnf_pareto.pareto import pareto_front
net = random_network(int(sys.argv[1]), n_edges=(int(sys.argv[2]),) * 2, failable_on_optimum=True)
t0 = time.perf_counter()
front = pareto_front(net)
print(time.perf_counter() - t0, len(front.points))
"""


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def simplex_args(seed: int, n_edges: int):
    net = random_network(seed, n_edges=(n_edges, n_edges), failable_on_optimum=True)
    cm = compile_model(fm.paired_model(net))
    cfg = SolverConfig()
    return (cm.A, cm.b, cm.c, cm.lo, cm.hi, cm.row_slack, cfg.max_lp_iterations,
            cfg.bland_after, cfg.feas_tol, cfg.opt_tol, cfg.pivot_tol)


def flow_args(seed: int, n_edges: int):
    net = random_network(seed, n_edges=(n_edges, n_edges))
    vid = {v: k for k, v in enumerate(net.vertices)}
    tails = np.array([vid[e.tail] for e in net.edges], dtype=np.int64)
    heads = np.array([vid[e.head] for e in net.edges], dtype=np.int64)
    caps = np.array([e.capacity for e in net.edges])
    costs = np.array([e.variable_cost for e in net.edges])
    return (len(net.vertices), tails, heads, caps, costs, vid[net.source], vid[net.sink], float(net.target))


def compare(label: str, plain, args, repeat: int) -> None:
    compiled = force_njit(plain)
    t0 = time.perf_counter()
    compiled(*args)
    warm = time.perf_counter() - t0
    tp = best_of(lambda: plain(*args), repeat)
    tc = best_of(lambda: compiled(*args), repeat)
    print(f"{label:<28} plain {tp * 1e3:10.2f} ms  numba {tc * 1e3:8.2f} ms  "
          f"speedup {tp / tc:7.1f}x  first call {warm:.2f} s")


def end_to_end(seed: int, n_edges: int) -> None:
    for flag in ("1", "0"):
        env = dict(os.environ, FCNF_PARETO_NUMBA=flag)
        t0 = time.perf_counter()
        out = subprocess.run(
            [sys.executable, "-c", END_TO_END, str(seed), str(n_edges)],
            env=env, capture_output=True, text=True, check=True,
        ).stdout.split()
        wall = time.perf_counter() - t0
        print(f"front seed={seed} edges={n_edges} FCNF_PARETO_NUMBA={flag}: "
              f"solve {float(out[0]):.2f} s, process {wall:.2f} s, {out[1]} points")


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--edges", type=int, default=14)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    compare("bounded_simplex (LP relax)", _kernels.bounded_simplex_py,
            simplex_args(args.seed, args.edges), args.repeat)
    compare("subset_flow_costs", _flowkernels.subset_flow_costs_py,
            flow_args(args.seed, args.edges), max(1, args.repeat // 2))
    end_to_end(args.seed, args.edges)
    return 0


if __name__ == "__main__":
    sys.exit(main())
