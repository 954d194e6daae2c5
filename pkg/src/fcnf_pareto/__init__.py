"""Fixed-charge network flow planning against the failure of one designated edge.

The main entry point is :func:`pareto_front`, which traces the trade-off
between the cost of the flow deployed up front and the cost of the best
repair after the failable edge goes down.
"""

from .network import (
    DirectedEdge,
    FlowNetwork,
    FlowSolution,
    NetworkError,
    load_network,
    network_from_dict,
    network_to_dict,
)
from .pareto import (
    InconsistencyError,
    NoFlowError,
    NoRepairError,
    ParetoFront,
    ParetoPoint,
    SolverLimitError,
    min_cost_flow,
    pareto_front,
)

__version__ = "0.1.0"

__all__ = [
    "DirectedEdge",
    "FlowNetwork",
    "FlowSolution",
    "InconsistencyError",
    "NetworkError",
    "NoFlowError",
    "NoRepairError",
    "ParetoFront",
    "ParetoPoint",
    "SolverLimitError",
    "load_network",
    "min_cost_flow",
    "network_from_dict",
    "network_to_dict",
    "pareto_front",
]
