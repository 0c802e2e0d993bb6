import warnings

import networkx as nx
import pytest
from hypothesis import HealthCheck, settings

from rainbowturan.errors import HeuristicInconclusive
from rainbowturan.graph import ColouredGraph, Graph

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _quiet_heuristics():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HeuristicInconclusive)
        yield


def from_nx(h: nx.Graph) -> Graph:
    h = nx.convert_node_labels_to_integers(h, ordering="sorted")
    return Graph(h.number_of_nodes(), h.edges())


def cycle(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    return from_nx(nx.complete_graph(n))


def complete_bipartite(a: int, b: int) -> Graph:
    return from_nx(nx.complete_bipartite_graph(a, b))


def path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def rainbow(g: Graph) -> ColouredGraph:
    """Every edge its own colour."""
    return ColouredGraph(g, {e: i for i, e in enumerate(g.edges)})


def rainbow_cycle(n: int) -> ColouredGraph:
    return rainbow(cycle(n))


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one pass/fail line per acceptance criterion; printed in the terminal summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append((number, line))
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
