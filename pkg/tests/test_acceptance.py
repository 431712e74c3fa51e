"""Acceptance criteria 1 to 12.

Each test records one PASS/FAIL line (shown in the terminal summary) and
then asserts.  Tolerances, budgets and run counts are the pinned ones.
Without the SNAP files in $GRAPHCRAWL_DATA_DIR the two social graphs are
seeded stand-ins of the same scale; lines are tagged with the source.
"""

import math

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, complete, directed, labels, path
from graphcrawl import datasets
from graphcrawl.edge_estimators import estimate_edge
from graphcrawl.evaluation import (TrialConfig, central_bins, delta, detection_trials, draw_stream,
                                   exact_edge_density, make_labeler, path_summary, path_trials, random_pairs,
                                   resolve_budget, run_seed, run_trials, spectral_alpha, valid_path)
from graphcrawl.graph import (EdgeLabeler, Graph, degree_labels, generate_directed_power_law, generate_synthetic,
                              largest_connected_component, random_labels)
from graphcrawl.node_estimators import (estimate_directed_neighbor, estimate_neighbor, estimate_out_neighbor,
                                        estimate_simple, psi)
from graphcrawl.sampling import SampleStream, _edge_cumweights, frontier_sample, random_walk

R = 1000


def record(n, ok, detail, source=None):
    tag = f" [{source}]" if source else ""
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'} criterion {n}{tag}: {detail}")
    return ok


@pytest.fixture(scope="module")
def epinions():
    g, info = datasets.load("soc-epinions")
    return g, info["source"]


@pytest.fixture(scope="module")
def slashdot():
    g, info = datasets.load("soc-slashdot")
    return g, info["source"]


# -- 1 ----------------------------------------------------------------------------

def small_graphs(count=20):
    rng = np.random.default_rng(2024)
    out = []
    while len(out) < count:
        n = int(rng.integers(20, 101))
        g = largest_connected_component(generate_synthetic("erdos-renyi", n, 6.0 / n, seed=int(rng.integers(1 << 31))))
        if g.node_count >= 10 and not spectral_alpha(g)["bipartite"]:
            out.append(g)
    return out


def tv(counts, p):
    return 0.5 * np.abs(counts / counts.sum() - p).sum()


def test_c1_stationary_correctness():
    steps = 10 ** 6
    worst_node, worst_edge = 0.0, 0.0
    for i, g in enumerate(small_graphs()):
        pi = g.degree / g.degree.sum()
        runs = [random_walk(g, 0, steps, seed=i),
                frontier_sample(g, 1, steps, seed=i),
                frontier_sample(g, 10, steps, seed=i)]
        for s in runs:
            worst_node = max(worst_node, tv(np.bincount(s.nodes, minlength=g.node_count), pi))
        for s in runs[1:]:
            lo, hi = np.minimum(s.edge_u, s.edge_v), np.maximum(s.edge_u, s.edge_v)
            _, counts = np.unique(lo * g.node_count + hi, return_counts=True)
            counts = np.concatenate([counts, np.zeros(g.edge_count_undirected - counts.size)])
            worst_edge = max(worst_edge, tv(counts, np.full(counts.size, 1.0 / counts.size)))
    ok = worst_node < 0.02 and worst_edge < 0.02
    record(1, ok, f"max node TV {worst_node:.4f}, max FS edge TV {worst_edge:.4f} (< 0.02) over 20 graphs")
    assert ok


# -- 2 ----------------------------------------------------------------------------

def test_c2_estimator_exactness():
    checks = []
    s = SampleStream.from_nodes(path(3), [0, 1, 2, 0], method="rw")
    checks.append((estimate_simple(s, labels("A", "B", "A")).values, [6 / 7, 1 / 7]))
    s = SampleStream.from_nodes(complete(3), [0], method="rw")
    checks.append((estimate_neighbor(s, labels("A", "A", "B")).values, [0.5, 0.5]))
    s = SampleStream.from_nodes(directed(3, [(0, 1), (1, 2), (2, 0)]), [0], method="rw")
    checks.append((estimate_directed_neighbor(s, labels("A", "A", "B")).values, [0.5, 0.5]))
    s = SampleStream.from_nodes(directed(2, [(0, 1)]), [0], method="uni")
    checks.append((estimate_out_neighbor(s, labels("A", "B"), gamma=1.0).values, [2 / 3, 1 / 3]))
    # WRW step probability from node 1 of P4 read off the sampler's own weight table
    g = path(4)
    cw = _edge_cumweights(g, 1.0, False)
    lo, hi = g.und_indptr[1], g.und_indptr[2]
    w = np.diff(np.concatenate([[0.0], cw[lo:hi]]))
    p_to_2 = w[g.und_indices[lo:hi].tolist().index(2)] / w.sum()
    checks.append((np.array([p_to_2]), [2 / 3]))
    err = max(float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) for a, b in checks)
    ok = err <= 1e-12
    record(2, ok, f"5 hand examples, max abs error {err:.2e} (<= 1e-12)")
    assert ok


# -- 3 ----------------------------------------------------------------------------

@pytest.fixture(scope="module")
def synth5k():
    g = largest_connected_component(generate_directed_power_law(5000, 4.0, seed=77))
    return g


def test_c3_asymptotic_unbiasedness(synth5k):
    g = synth5k
    n = round(0.1 * g.node_count)
    deg = degree_labels(g)
    gender = random_labels(g.node_count, ("F", "M", "U"), (0.375, 0.538, 0.087), seed=78)
    # edge labels are gender pairs so that several of them carry mass >= 0.05
    cases = [(e, deg, "degree-pair") for e in ("simple", "neighbor", "mixture", "directed-neighbor", "out-neighbor")]
    cases += [(e, gender, "label-pair") for e in ("edge-traversal", "edge-neighbor")]
    cases += [(e, gender, "label-pair-directed") for e in ("edge-traversal-directed", "edge-neighbor-directed")]
    worst = {}
    for est, lab, labeler in cases:
        cfg = TrialConfig(method="fs", estimator=est, budget=n, runs=200, seed=3, edge_labeler=labeler)
        t = run_trials(cfg, g, lab)
        big = t.truth >= 0.05
        assert big.any()
        rel = np.abs(t.estimates.mean(axis=0)[big] - t.truth[big]) / t.truth[big]
        worst[est] = float(rel.max())
    ok = all(v <= 0.05 for v in worst.values())
    detail = ", ".join(f"{k} {v:.3f}" for k, v in worst.items())
    record(3, ok, f"max relative bias of the mean over 200 runs at n={n}: {detail} (<= 0.05)")
    assert ok


# -- 4 to 6 --------------------------------------------------------------------------

@pytest.fixture(scope="module")
def fs_tables(epinions):
    g, _ = epinions
    B = resolve_budget("0.001V", g.node_count)
    lab = degree_labels(g)

    def table(est, b):
        return run_trials(TrialConfig(method="fs", estimator=est, budget=b, runs=R, seed=1), g, lab)

    return B, {("simple", 1): table("simple", B), ("simple", 2): table("simple", 2 * B),
               ("simple", 4): table("simple", 4 * B), ("neighbor", 1): table("neighbor", B),
               ("mixture", 1): table("mixture", B)}


def test_c4_inverse_sqrt_scaling(epinions, fs_tables):
    B, t = fs_tables
    a, b = t[("simple", 1)], t[("simple", 4)]
    big = a.truth >= 0.05
    ratio = a.nmse()[big] / b.nmse()[big]
    ok = bool(np.all((ratio >= 1.5) & (ratio <= 2.6)))
    record(4, ok, f"NMSE(B)/NMSE(4B) at B={B}, R={R} over {big.sum()} labels: "
                  f"{ratio.min():.3f}..{ratio.max():.3f} (in [1.5, 2.6])", epinions[1])
    assert ok


def test_c5_neighborhood_gain(epinions, fs_tables):
    B, t = fs_tables
    nb, s2 = t[("neighbor", 1)], t[("simple", 2)]
    bins = central_bins(nb.keys, nb.truth)
    k, c_nb = nb.cnmse()
    _, c_s2 = s2.cnmse()
    pick = np.isin(k, bins) & np.isfinite(c_s2) & np.isfinite(c_nb)
    frac = float(np.mean(c_nb[pick] <= c_s2[pick]))
    ok = frac >= 0.8
    record(5, ok, f"neighbor CNMSE at B <= simple CNMSE at 2B in {frac:.1%} of {pick.sum()} central bins "
                  f"(>= 80%)", epinions[1])
    assert ok


def test_c6_mixture_dominance(epinions, fs_tables):
    B, t = fs_tables
    s, nb, mx = t[("simple", 1)], t[("neighbor", 1)], t[("mixture", 1)]
    big = s.truth >= 0.05
    ratio = mx.nmse()[big] / np.minimum(s.nmse()[big], nb.nmse()[big])
    ok = bool(np.all(ratio <= 1.1))
    record(6, ok, f"mixture NMSE / min(simple, neighbor) at B={B}: {ratio.min():.3f}..{ratio.max():.3f} "
                  f"(<= 1.1); B={B} gives only {max(2, B // 20)} calibration subsets", epinions[1])
    assert ok


# -- 7 ----------------------------------------------------------------------------

def test_c7_cost_model_ordering(epinions):
    g, source = epinions
    B = resolve_budget("0.01V", g.node_count)
    lab = degree_labels(g)

    def nmse(method, c):
        cfg = TrialConfig(method=method, estimator="neighbor", budget=B, runs=R, seed=7, uni_cost_c=c,
                          charge_seeds=True)
        t = run_trials(cfg, g, lab)
        return t.nmse()[t.truth >= 0.01]

    ss, fs, rw = nmse("uni", 10), nmse("fs", 10), nmse("rw", 10)
    ok = bool(np.all(fs < ss) and np.all(rw < ss))
    ss1, fs1, rw1 = nmse("uni", 1), nmse("fs", 1), nmse("rw", 1)
    record(7, ok, f"c=10, B={B}: mean NMSE FS {fs.mean():.3f}, RW {rw.mean():.3f} < SS {ss.mean():.3f} "
                  f"on every label with mass >= 0.01; c=1 (reported): FS {fs1.mean():.3f}, RW {rw1.mean():.3f}, "
                  f"SS {ss1.mean():.3f}", source)
    assert ok


# -- 8 ----------------------------------------------------------------------------

def deltas(g, estimator, runs, seed):
    B = resolve_budget("0.001V", g.node_count)
    cfg = TrialConfig(method="fs", estimator=estimator, budget=B, runs=runs, seed=seed)
    labeler = EdgeLabeler.degree_pair()
    truth = exact_edge_density(g, labeler)
    out = np.empty(runs)
    for r in range(runs):
        est = estimate_edge(estimator, draw_stream(g, cfg, B, run_seed(seed, r)), labeler)
        out[r] = delta(est.values, truth.values)
    return out


@pytest.mark.parametrize("name", ["soc-epinions", "soc-slashdot"])
def test_c8_joint_degree_distribution(name):
    g, info = datasets.load(name)
    d_nb = deltas(g, "edge-neighbor", R, 8)
    d_tr = deltas(g, "edge-traversal", R, 8)
    frac = float(np.mean(d_nb < 0.1))
    gain = float(np.median(d_tr) / np.median(d_nb))
    ok = frac >= 0.85 and gain >= 2
    record(8, ok, f"{name}: {frac:.1%} of {R} runs with delta < 0.1 (>= 85%); median delta without neighbor "
                  f"degrees / with = {gain:.2f} (>= 2)", info["source"])
    assert ok


# -- 9 ----------------------------------------------------------------------------

def test_c9_detection(epinions):
    g, source = epinions
    B = resolve_budget("0.01V", g.node_count)
    res = {m: detection_trials(g, m, B, 100, 50, 9, beta=1.0) for m in ("mxs", "wrw", "rw", "rw-sampled-only")}
    mean = {m: r["recall_mean"] for m, r in res.items()}
    se = {m: r["recall_std"] / math.sqrt(r["seeds"]) for m, r in res.items()}
    spent = {m: float(r["spent"].mean()) for m, r in res.items()}

    def not_below(a, b):
        return mean[a] >= mean[b] - 3 * math.hypot(se[a], se[b])

    order = [("mxs", "wrw"), ("wrw", "rw")]
    strict = mean["rw"] - mean["rw-sampled-only"] > 3 * math.hypot(se["rw"], se["rw-sampled-only"])
    equal_cost = len(set(spent.values())) == 1
    ok = mean["mxs"] >= 0.8 and all(not_below(a, b) for a, b in order) and strict and equal_cost
    record(9, ok, "mean recall of top-100 over 50 seeds at B=%d: MXS %.3f, WRW %.3f, RW %.3f, sampled-only %.3f; "
                  "ledger cost %s" % (B, mean["mxs"], mean["wrw"], mean["rw"], mean["rw-sampled-only"],
                                      sorted(set(spent.values()))), source)
    assert ok


# -- 10 ---------------------------------------------------------------------------

def test_c10_short_paths(epinions):
    g, source = epinions
    pairs = random_pairs(g, 1000, 10)
    results = path_trials(g, ["RW", "WRW", "MXS"], 20, pairs, 10, beta=1.0)
    summ = {s: path_summary(r, g) for s, r in results.items()}
    valid = all(valid_path(g, r.path) and r.d_star >= r.true_d for rs in results.values() for r in rs if r.found)
    m, rw, w = summ["MXS"], summ["RW"], summ["WRW"]
    se = math.hypot(m["failure_se"], rw["failure_se"])
    fail_gap = rw["failure_fraction"] - m["failure_fraction"]
    ok_fail = m["failure_fraction"] < 0.05 and fail_gap >= 3 * se and fail_gap > 0
    ok_excess = m["mean_excess"] <= rw["mean_excess"] and w["mean_excess"] <= rw["mean_excess"]
    ok = ok_fail and ok_excess and valid
    record(10, ok, "1000 pairs, B=20: failure MXS %.3f, WRW %.3f, RW %.3f (MXS below RW by >= 3 SE: %s); "
                   "mean excess MXS %.3f, WRW %.3f, RW %.3f; all paths valid: %s"
           % (m["failure_fraction"], w["failure_fraction"], rw["failure_fraction"], ok_fail,
              m["mean_excess"], w["mean_excess"], rw["mean_excess"], valid), source)
    assert ok


# -- 11 ---------------------------------------------------------------------------

def test_c11_property_suites(tmp_path, synth5k):
    # psi-sum identity on 10^5 fuzzed directed nodes
    rng = np.random.default_rng(11)
    n = 10 ** 5
    m = 4 * n
    g = Graph.from_edges(n, rng.integers(0, n, m), rng.integers(0, n, m), directed=True)
    nodes = np.flatnonzero(g.degree)
    batch = SampleStream.from_nodes(g, nodes, method="uni").replies()
    sums = np.bincount(batch.row, weights=psi(batch), minlength=len(batch))
    psi_ok = bool(np.array_equal(sums, g.in_degree[batch.nodes] + g.out_degree[batch.nodes]))

    # normalization of every density output
    h = synth5k
    lab = degree_labels(h)
    s = frontier_sample(h, 10, 2000, seed=1)
    from graphcrawl.edge_estimators import EDGE_ESTIMATORS
    from graphcrawl.node_estimators import estimate_node
    sums_node = [estimate_node(e, s, lab).values.sum() for e in ("simple", "neighbor", "mixture",
                                                                 "directed-neighbor", "out-neighbor")]
    sums_edge = [sum(estimate_edge(e, s, make_labeler("degree-pair", None)).values.values())
                 for e in EDGE_ESTIMATORS]
    norm_err = max(abs(x - 1) for x in sums_node + sums_edge)

    # determinism: equal seeds give byte-equal CSVs
    cfg = TrialConfig(method="fs", estimator="neighbor", budget=200, runs=5, seed=4)
    run_trials(cfg, h, lab).write(tmp_path / "a")
    run_trials(cfg, h, lab).write(tmp_path / "b")
    det_ok = all((tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
                 for f in ("nmse.csv", "runs.csv"))

    # exhaustive streams are exact for the simple node and neighbor edge estimators
    every = SampleStream.from_nodes(h, np.arange(h.node_count), method="uni")
    theta_err = float(np.abs(estimate_simple(every, lab).values
                             - np.bincount(lab.node_labels) / h.node_count).max())
    jdd = EdgeLabeler.degree_pair()
    tau = estimate_edge("edge-neighbor", every, jdd).values
    truth = exact_edge_density(h, jdd).values
    tau_err = max(abs(tau.get(k, 0.0) - x) for k, x in truth.items())
    ok = psi_ok and norm_err <= 1e-12 and det_ok and theta_err <= 1e-12 and tau_err <= 1e-12
    record(11, ok, f"psi identity on {len(batch)} nodes: {psi_ok}; max normalization error {norm_err:.1e}; "
                   f"byte-equal CSVs: {det_ok}; exhaustive-stream error {max(theta_err, tau_err):.1e}")
    assert ok


# -- 12 ---------------------------------------------------------------------------

def test_c12_out_of_scope():
    ACCEPTANCE_LINES.append("SKIP criterion 12: live online-network measurements are not reproducible here "
                            "(out of scope by definition)")
    pytest.skip("live online-network measurements are out of scope")


# -- dataset sizes ----------------------------------------------------------------------

@pytest.mark.parametrize("name,nodes,edges", [("soc-epinions", 75877, 405739), ("soc-slashdot", 77360, None)])
def test_dataset_lcc_sizes(name, nodes, edges):
    if datasets.find_file(name) is None:
        pytest.skip(f"{name} edge list not in ${datasets.DATA_ENV}; stand-in in use")
    g, _ = datasets.load(name)
    assert g.node_count == nodes
    if edges is not None:
        assert g.edge_count_undirected == edges
