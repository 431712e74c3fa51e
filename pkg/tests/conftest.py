import warnings

import numpy as np
import pytest

from graphcrawl.graph import Graph, LabelTable


def undirected(n, edges):
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    return Graph.from_edges(n, e[:, 0], e[:, 1], directed=False)


def directed(n, edges):
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    return Graph.from_edges(n, e[:, 0], e[:, 1], directed=True)


def path(n):
    return undirected(n, [(i, i + 1) for i in range(n - 1)])


def star(leaves):
    return undirected(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete(n):
    return undirected(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle(n):
    return undirected(n, [(i, (i + 1) % n) for i in range(n)])


def labels(*names):
    """Per-node label table from a sequence like ("A", "A", "B")."""
    return LabelTable.from_values(list(names))


@pytest.fixture(autouse=True)
def _quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        yield


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
