"""CPLEX-style LP text export, for cross-checking against external solvers."""

from __future__ import annotations

import math
import re

from .model import BINARY, MilpModel

_BAD = re.compile(r"[^A-Za-z0-9_!\"#$%&()/,.;?@`'{}|~]")
_TERMS_PER_LINE = 6


def _num(v: float) -> str:
    if v == math.inf:
        return "+inf"
    if v == -math.inf:
        return "-inf"
    return format(v, ".17g")


def _name_map(names: list[str], prefix: str) -> dict[str, str]:
    out: dict[str, str] = {}
    used: set[str] = set()
    for k, name in enumerate(names):
        clean = _BAD.sub("_", name)
        if not clean or clean[0].isdigit() or clean[0] in ".eE":
            clean = prefix + clean
        if clean in used:
            clean = f"{clean}__{k}"
        used.add(clean)
        out[name] = clean
    return out


def _expr(terms: dict[str, float], names: dict[str, str]) -> str:
    parts = []
    for k, (var, coef) in enumerate(terms.items()):
        sign = "-" if coef < 0 else "+"
        piece = f"{sign} {_num(abs(coef))} {names[var]}"
        if k and k % _TERMS_PER_LINE == 0:
            piece = "\n   " + piece
        parts.append(piece)
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def export_lp(model: MilpModel) -> str:
    vnames = _name_map([v.name for v in model.variables], "x_")
    cnames = _name_map([c.name for c in model.constraints], "c_")
    lines = [f"\\ Problem: {model.name}"]
    if not model.variables:
        lines.append("End")
        return "\n".join(lines) + "\n"

    lines.append("Minimize" if model.objective.sense == "min" else "Maximize")
    obj = {k: v for k, v in model.objective.terms.items() if v != 0.0}
    if not obj:
        obj = {model.variables[0].name: 0.0}
    lines.append(" obj: " + _expr(obj, vnames))

    lines.append("Subject To")
    for con in model.constraints:
        terms = {k: v for k, v in con.terms.items() if v != 0.0}
        if not terms:
            terms = {model.variables[0].name: 0.0}
        lines.append(f" {cnames[con.name]}: {_expr(terms, vnames)} {con.sense} {_num(con.rhs)}")

    lines.append("Bounds")
    for v in model.variables:
        if v.kind == BINARY:
            continue
        name = vnames[v.name]
        if v.lb == -math.inf and v.ub == math.inf:
            lines.append(f" {name} free")
        elif v.lb == v.ub:
            lines.append(f" {name} = {_num(v.lb)}")
        elif not (v.lb == 0.0 and v.ub == math.inf):
            lines.append(f" {_num(v.lb)} <= {name} <= {_num(v.ub)}")

    bins = [vnames[v.name] for v in model.variables if v.kind == BINARY]
    if bins:
        lines.append("Binaries")
        for k in range(0, len(bins), 8):
            lines.append(" " + " ".join(bins[k:k + 8]))
    lines.append("End")
    return "\n".join(lines) + "\n"
