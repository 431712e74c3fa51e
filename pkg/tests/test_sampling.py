import numpy as np
import pytest

from conftest import complete, labels, path, star, undirected
from graphcrawl.access import (BudgetExhausted, CapabilityError, CostLedger, Crawler, Visibility, require)
from graphcrawl.graph import GraphError, LabelTable
from graphcrawl.sampling import (SampleStream, frontier_sample, random_walk, read_stream, uni_sample,
                                 weighted_random_walk, write_stream)


def stationary(g):
    """Power iteration on the exact transition matrix."""
    n = g.node_count
    P = np.zeros((n, n))
    for v in range(n):
        nb = g.neighbors(v)
        P[v, nb] = 1.0 / nb.size
    x = np.full(n, 1.0 / n)
    for _ in range(5000):
        x = 0.5 * (x + x @ P)
    return x


# -- access layer ---------------------------------------------------------------

@pytest.mark.parametrize("vis,ok", [("self-only", False), ("nbr-degrees", True),
                                    ("nbr-degrees-labels", True), ("out-nbr-with-indeg", False)])
def test_neighbor_degree_gate(vis, ok):
    rep = Crawler(star(3), Visibility.parse(vis)).query(0)
    assert rep.neighbors.tolist() == [1, 2, 3]
    if ok:
        assert rep.nbr_degree.tolist() == [1, 1, 1]
    else:
        with pytest.raises(CapabilityError):
            rep.nbr_degree


def test_require_message():
    with pytest.raises(CapabilityError, match="requires neighbor degrees and neighbor labels"):
        require(Visibility.SELF_ONLY, "nbr_degree", "nbr_label", what="estimator")


def test_crawler_caches_and_charges():
    led = CostLedger(budget_B=2)
    c = Crawler(path(4), ledger=led)
    c.query(0)
    c.query(0)
    c.query(1, neighbor=True)
    assert (led.spent_crawl, led.spent_neighbor_crawl) == (1, 1)
    with pytest.raises(BudgetExhausted):
        c.query(2)
    assert led.exhausted


def test_visibility_parse():
    assert Visibility.parse("NBR_DEGREES") is Visibility.NBR_DEGREES
    with pytest.raises(ValueError):
        Visibility.parse("everything")


# -- UNI --------------------------------------------------------------------------

def test_uni_uniform_on_k3():
    s = uni_sample(complete(3), 300_000, seed=1)
    freq = np.bincount(s.nodes, minlength=3) / len(s)
    assert np.all(np.abs(freq - 1 / 3) <= 0.005)


def test_uni_cost_charging():
    led = CostLedger(uni_cost_c=77)
    uni_sample(complete(5), 100, led, seed=1)
    assert led.spent_uni_attempts == 7700


def test_uni_budget_cut():
    led = CostLedger(budget_B=5 * 7, uni_cost_c=7)
    s = uni_sample(complete(5), 10, led, seed=1)
    assert len(s) == 5 and s.exhausted


def test_uni_stochastic_cost_mean():
    led = CostLedger(uni_cost_c=10, stochastic_uni=True)
    uni_sample(complete(5), 20_000, led, seed=2)
    assert abs(led.spent_uni_attempts / 20_000 - 10) < 0.3


# -- random walks ------------------------------------------------------------------

def test_rw_k3_matches_stationary():
    g = complete(3)
    s = random_walk(g, 0, 300_000, seed=3)
    freq = np.bincount(s.nodes, minlength=3) / len(s)
    assert np.all(np.abs(freq - stationary(g)) <= 0.005)
    assert np.allclose(stationary(g), 2 / 6)


def test_rw_first_step_from_leaf():
    s = random_walk(path(3), 0, 2, seed=9)
    assert s.nodes[0] == 1


def test_rw_accounting():
    led = CostLedger()
    s = random_walk(complete(6), 0, 50, led, seed=1)
    assert len(s.traversed_edges) == 50 and led.spent_crawl == 50
    assert all(v in complete(6).neighbors(u) for u, v in s.traversed_edges)


def test_rw_rejects_isolated_start():
    g = undirected(3, [(0, 1)])
    with pytest.raises(GraphError):
        random_walk(g, 2, 5, seed=1)


# -- frontier sampling -----------------------------------------------------------------

@pytest.mark.parametrize("seed", [0, 1, 2])
def test_fs_single_walker_is_rw(seed):
    g = undirected(6, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5), (5, 1)])
    a = random_walk(g, 2, 200, seed=seed)
    b = frontier_sample(g, 1, 200, seeds=[2], seed=seed)
    assert np.array_equal(a.nodes, b.nodes)


def test_fs_edges_uniform_on_k3():
    s = frontier_sample(complete(3), 3, 300_000, seeds=[0, 1, 2], seed=4)
    u, v = np.minimum(s.edge_u, s.edge_v), np.maximum(s.edge_u, s.edge_v)
    freq = np.bincount(u * 3 + v, minlength=9)[[1, 2, 5]] / len(s)
    assert np.all(np.abs(freq - 1 / 3) <= 0.005)


def test_fs_seed_charges():
    g = complete(20)
    led = CostLedger(uni_cost_c=3)
    s = frontier_sample(g, 10, 40, ledger=led, seed=1)
    assert led.spent_uni_attempts == 30 and led.spent_crawl == 40 and len(s) == 40


def test_fs_walker_ids_present():
    s = frontier_sample(complete(8), 4, 100, seed=5)
    assert s.walker is not None and set(s.walker.tolist()) <= set(range(4))


# -- weighted random walk ----------------------------------------------------------------

def test_wrw_beta_zero_is_rw():
    g = undirected(6, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5)])
    a = random_walk(g, 0, 300, seed=7)
    b = weighted_random_walk(g, 0, 300, beta=0.0, seed=7)
    assert np.array_equal(a.nodes, b.nodes)


@pytest.mark.parametrize("beta", [0.0, 0.5, 1.0, 3.0])
def test_wrw_leaf_moves_to_hub(beta):
    s = weighted_random_walk(star(4), 2, 1, beta=beta, seed=1)
    assert s.nodes.tolist() == [0]


def test_wrw_p4_step_probability():
    g = path(4)
    s = weighted_random_walk(g, 1, 200_000, beta=1.0, seed=3)
    prev, nxt = s.edge_u, s.edge_v
    at1 = prev == 1
    p = np.mean(nxt[at1] == 2)
    # (d1 d2) / (d1 d0 + d1 d2) = 4 / 6
    assert abs(p - 2 / 3) < 0.01


def test_wrw_needs_neighbor_degrees():
    with pytest.raises(CapabilityError):
        weighted_random_walk(path(4), 0, 5, visibility=Visibility.SELF_ONLY, seed=1)


# -- record files -------------------------------------------------------------------------

@pytest.mark.parametrize("method", ["uni", "rw", "fs", "wrw"])
def test_stream_roundtrip(tmp_path, method):
    g = undirected(6, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5)])
    lab = labels("A", "B", "A", "B", "A", "C")
    s = {"uni": lambda: uni_sample(g, 30, seed=1),
         "rw": lambda: random_walk(g, 0, 30, seed=1),
         "fs": lambda: frontier_sample(g, 3, 30, seed=1),
         "wrw": lambda: weighted_random_walk(g, 0, 30, beta=0.5, seed=1)}[method]()
    p = tmp_path / "s.txt"
    write_stream(p, s, lab)
    back = read_stream(p, LabelTable.space(lab.label_names))
    assert np.array_equal(back.nodes, s.nodes)
    assert back.method == s.method and back.pi_hat_rule == s.pi_hat_rule
    a, b = s.replies(lab), back.replies()
    assert np.allclose(s.pi_hat(a), back.pi_hat(b))


def test_from_nodes_pi_hat():
    g = path(3)
    s = SampleStream.from_nodes(g, [0, 1, 2, 0], method="rw")
    assert s.pi_hat(s.replies()).tolist() == [1, 2, 1]
