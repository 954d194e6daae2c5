from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from _reference import demo_files  # noqa: E402

from fcnf_pareto.network import DirectedEdge, FlowNetwork  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])


def edge(eid: str, tail: str, head: str, cap: float = 1.0, fixed: float = 0.0, var: float = 0.0) -> DirectedEdge:
    return DirectedEdge(eid, tail, head, cap, fixed, var)


@pytest.fixture
def diamond() -> FlowNetwork:
    """s->a->t is cheap but fails on (a,t); s->b->t is the detour."""
    return FlowNetwork(
        vertices=("s", "a", "b", "t"),
        edges=(
            edge("sa", "s", "a", 2, 1, 1),
            edge("at", "a", "t", 2, 1, 1),
            edge("sb", "s", "b", 2, 4, 1),
            edge("bt", "b", "t", 2, 4, 1),
            edge("ab", "a", "b", 2, 1, 0),
        ),
        source="s",
        sink="t",
        target=2.0,
        failable_edge="at",
    )


@pytest.fixture
def demo():
    return demo_files()
