"""Container types for linear and mixed-binary programs."""

from __future__ import annotations

import copy
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np

CONTINUOUS = "continuous"
BINARY = "binary"
SENSES = ("<=", "=", ">=")


class ModelError(ValueError):
    pass


@dataclass
class Variable:
    name: str
    kind: str = CONTINUOUS
    lb: float = 0.0
    ub: float = math.inf


@dataclass
class Constraint:
    name: str
    terms: dict[str, float]
    sense: str
    rhs: float


@dataclass
class Objective:
    sense: str = "min"
    terms: dict[str, float] = field(default_factory=dict)


@dataclass
class SolverConfig:
    int_tol: float = 1e-6
    feas_tol: float = 1e-7
    opt_tol: float = 1e-9
    pivot_tol: float = 1e-9
    node_limit: int = 1_000_000
    time_limit: float | None = None
    max_lp_iterations: int = 100_000
    bland_after: int = 50

    def __post_init__(self) -> None:
        if self.node_limit <= 0 or self.max_lp_iterations <= 0:
            raise ValueError("limits must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> SolverConfig:
        known = set(cls.__dataclass_fields__)
        extra = set(doc) - known
        if extra:
            raise ValueError(f"unknown solver config keys: {sorted(extra)}")
        return cls(**doc)


@dataclass
class MilpResult:
    status: str
    objective_value: float | None = None
    assignment: dict[str, float] | None = None
    stats: dict[str, Any] = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class MilpModel:
    """Variables, linear constraints and a linear objective.

    Binary variables always carry bounds [0, 1]. Names must be unique within
    variables and within constraints.
    """

    def __init__(self, name: str = "model") -> None:
        self.name = name
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []
        self.objective = Objective()
        self._var_index: dict[str, int] = {}
        self._con_names: set[str] = set()

    def add_var(self, name: str, kind: str = CONTINUOUS, lb: float = 0.0, ub: float = math.inf) -> str:
        if name in self._var_index:
            raise ModelError(f"duplicate variable {name!r}")
        if kind == BINARY:
            lb, ub = 0.0, 1.0
        elif kind != CONTINUOUS:
            raise ModelError(f"unsupported variable kind {kind!r}")
        if lb > ub:
            raise ModelError(f"variable {name!r}: lb {lb} > ub {ub}")
        self._var_index[name] = len(self.variables)
        self.variables.append(Variable(name, kind, float(lb), float(ub)))
        return name

    def add_constraint(self, name: str, terms: Mapping[str, float], sense: str, rhs: float) -> None:
        if name in self._con_names:
            raise ModelError(f"duplicate constraint {name!r}")
        if sense not in SENSES:
            raise ModelError(f"constraint {name!r}: bad sense {sense!r}")
        for v in terms:
            if v not in self._var_index:
                raise ModelError(f"constraint {name!r}: unknown variable {v!r}")
        self._con_names.add(name)
        self.constraints.append(Constraint(name, dict(terms), sense, float(rhs)))

    def set_objective(self, sense: str, terms: Mapping[str, float]) -> None:
        if sense not in ("min", "max"):
            raise ModelError(f"bad objective sense {sense!r}")
        for v in terms:
            if v not in self._var_index:
                raise ModelError(f"objective: unknown variable {v!r}")
        self.objective = Objective(sense, dict(terms))

    def var_index(self, name: str) -> int:
        return self._var_index[name]

    def has_var(self, name: str) -> bool:
        return name in self._var_index

    @property
    def binaries(self) -> list[str]:
        return [v.name for v in self.variables if v.kind == BINARY]

    def copy(self) -> MilpModel:
        return copy.deepcopy(self)

    def evaluate(self, terms: Mapping[str, float], assignment: Mapping[str, float]) -> float:
        return sum(coef * assignment[name] for name, coef in terms.items())

    def violations(self, assignment: Mapping[str, float], tol: float = 1e-6) -> list[str]:
        """Names of constraints or bounds broken by ``assignment`` beyond ``tol`` (scaled by rhs)."""
        bad = []
        for v in self.variables:
            val = assignment[v.name]
            if val < v.lb - tol or val > v.ub + tol:
                bad.append(f"bound:{v.name}")
        for con in self.constraints:
            lhs = self.evaluate(con.terms, assignment)
            slack = tol * max(1.0, abs(con.rhs))
            if con.sense == "<=" and lhs > con.rhs + slack:
                bad.append(con.name)
            elif con.sense == ">=" and lhs < con.rhs - slack:
                bad.append(con.name)
            elif con.sense == "=" and abs(lhs - con.rhs) > slack:
                bad.append(con.name)
        return bad


@dataclass
class CompiledModel:
    """Dense equality form ``A x = b`` with slack columns appended.

    Structural columns come first, in declaration order; ``c`` is always in
    minimisation form (``obj_sign`` restores the declared sense).
    """

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    n_struct: int
    binary_idx: np.ndarray
    obj_sign: float
    names: list[str]
    row_slack: np.ndarray


def compile_model(model: MilpModel) -> CompiledModel:
    n = len(model.variables)
    n_slack = sum(1 for con in model.constraints if con.sense != "=")
    m = len(model.constraints)
    A = np.zeros((m, n + n_slack))
    b = np.zeros(m)
    lo = np.empty(n + n_slack)
    hi = np.empty(n + n_slack)
    for j, v in enumerate(model.variables):
        lo[j] = v.lb
        hi[j] = v.ub
    lo[n:] = 0.0
    hi[n:] = np.inf
    row_slack = np.full(m, -1, dtype=np.int64)
    k = n
    for i, con in enumerate(model.constraints):
        for name, coef in con.terms.items():
            A[i, model.var_index(name)] += coef
        b[i] = con.rhs
        if con.sense == "<=":
            A[i, k] = 1.0
            row_slack[i] = k
            k += 1
        elif con.sense == ">=":
            A[i, k] = -1.0
            row_slack[i] = k
            k += 1
    obj_sign = 1.0 if model.objective.sense == "min" else -1.0
    c = np.zeros(n + n_slack)
    for name, coef in model.objective.terms.items():
        c[model.var_index(name)] += obj_sign * coef
    binary_idx = np.array(
        [j for j, v in enumerate(model.variables) if v.kind == BINARY], dtype=np.int64
    )
    return CompiledModel(A, b, c, lo, hi, n, binary_idx, obj_sign, [v.name for v in model.variables], row_slack)
