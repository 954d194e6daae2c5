from .lpformat import export_lp
from .model import (
    BINARY,
    CONTINUOUS,
    CompiledModel,
    Constraint,
    MilpModel,
    MilpResult,
    ModelError,
    Objective,
    SolverConfig,
    Variable,
    compile_model,
)
from .solver import solve, solve_lp

__all__ = [
    "BINARY",
    "CONTINUOUS",
    "CompiledModel",
    "Constraint",
    "MilpModel",
    "MilpResult",
    "ModelError",
    "Objective",
    "SolverConfig",
    "Variable",
    "compile_model",
    "export_lp",
    "solve",
    "solve_lp",
]
