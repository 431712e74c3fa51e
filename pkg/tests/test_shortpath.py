import math

import numpy as np
import pytest

from conftest import complete, path, star, undirected
from graphcrawl.access import CostLedger
from graphcrawl.evaluation import valid_path
from graphcrawl.graph import GraphError, generate_synthetic
from graphcrawl.shortpath import (STRATEGIES, discover_short_path, edge_coverage, observed_graph,
                                  true_distance)


def edge_set(obs):
    return set(zip(obs.edge_u.tolist(), obs.edge_v.tolist()))


def test_observed_graph_hub():
    g = star(4)
    obs = observed_graph([[0]], g)
    assert obs.nodes.tolist() == [0, 1, 2, 3, 4]
    assert edge_set(obs) == {(0, 1), (0, 2), (0, 3), (0, 4)}
    assert edge_coverage(obs, g) == 1.0


def test_observed_graph_leaf():
    obs = observed_graph([[3]], star(4))
    assert obs.nodes.tolist() == [0, 3]
    assert edge_set(obs) == {(0, 3)}


def test_observed_graph_ignores_other_component():
    g = undirected(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    obs = observed_graph([[0], [1]], g)
    assert set(obs.nodes.tolist()) == {0, 1, 2}
    assert edge_set(obs) == {(0, 1), (0, 2), (1, 2)}


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_p3_hand_case(strategy):
    led = CostLedger()
    r = discover_short_path(path(3), 0, 2, 1, strategy, ledger=led, seed=1, true_d=2)
    assert r.found and r.path == [0, 1, 2] and r.d_star == 2
    assert led.spent == 4


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_adjacent_pair_distance_one(strategy):
    g = generate_synthetic("configuration-power-law", 300, 2.4, seed=1)
    src, dst = g.edges(directed=False)
    u, v = int(src[0]), int(dst[0])
    assert discover_short_path(g, u, v, 3, strategy, seed=2).d_star == 1


def test_true_distance():
    g = undirected(5, [(0, 1), (1, 2), (2, 3)])
    assert true_distance(g, 0, 3) == 3
    assert true_distance(g, 0, 0) == 0
    assert math.isinf(true_distance(g, 0, 4))


def test_same_endpoint_rejected():
    with pytest.raises(GraphError):
        discover_short_path(complete(3), 1, 1, 2)


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_paths_are_real_and_not_shorter(strategy):
    g = generate_synthetic("configuration-power-law", 400, 2.3, seed=5)
    rng = np.random.default_rng(0)
    nodes = np.flatnonzero(g.degree)
    for _ in range(15):
        u, v = rng.choice(nodes, 2, replace=False).tolist()
        d = true_distance(g, u, v)
        r = discover_short_path(g, u, v, 5, strategy, seed=3, true_d=d)
        if r.found:
            assert valid_path(g, r.path) and r.path[0] == u and r.path[-1] == v
            assert r.d_star >= d


def test_csv_row():
    r = discover_short_path(path(3), 0, 2, 1, "RW", seed=1, true_d=2)
    assert r.csv_row() == {"u": 0, "v": 2, "true_d": 2, "d_star": 2, "found": 1, "strategy": "RW", "B": 1}
