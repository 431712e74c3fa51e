"""Ground truth, error metrics and the Monte Carlo trial runner.

Per-run seeds come from ``SeedSequence(master, spawn_key=(run,))`` so a
run's randomness does not depend on how many runs there are, and outputs
are byte-identical for equal master seeds.
"""

from __future__ import annotations

import csv
import dataclasses
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse.csgraph import connected_components, shortest_path

from . import sampling
from .access import CapabilityError, CostLedger, Visibility, require
from .detection import (SAMPLED_ONLY, SAMPLED_PLUS_NEIGHBORHOOD, exact_top_n, mxs_detect, rw_detect,
                        wrw_detect, xs_detect)
from .edge_estimators import EDGE_ESTIMATORS, EdgeDensityEstimate, _aggregate, estimate_edge
from .graph import EdgeLabeler, Graph, GraphError, LabelTable, degree_labels, load_labels
from .node_estimators import DensityEstimate, estimate_node, requirements
from .shortpath import PathResult, discover_short_path, true_distance

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid experiment configuration, detected before any run."""


# -- oracles ------------------------------------------------------------------

def exact_node_density(g: Graph, labels: LabelTable) -> DensityEstimate:
    counts = np.bincount(labels.node_labels, minlength=labels.K).astype(float)
    return DensityEstimate(counts / g.node_count, labels.label_names, "exact", g.node_count,
                           float(g.node_count))


def node_attrs(g: Graph, nodes, labels: LabelTable | None = None) -> dict:
    a = {"degree": g.degree[nodes], "in_degree": g.in_degree[nodes], "out_degree": g.out_degree[nodes]}
    if labels is not None:
        a["label"] = labels.node_labels[nodes]
    return a


def exact_edge_density(g: Graph, labeler: EdgeLabeler, labels: LabelTable | None = None,
                       directed: bool = False) -> EdgeDensityEstimate:
    """Label masses over all undirected edges, or over E_d when ``directed``."""
    if directed and not g.directed:
        raise GraphError("directed edge density needs a directed graph")
    u, v = g.edges(directed=directed)
    mass, total = _aggregate(labeler, u, v, node_attrs(g, u, labels), node_attrs(g, v, labels),
                             np.ones(u.size))
    return EdgeDensityEstimate({k: x / total for k, x in mass.items()}, "exact", total, int(u.size))


def fit_power_law_exponent(degrees, d_min: int) -> float:
    """Discrete maximum-likelihood tail exponent (continuity-corrected)."""
    d = np.asarray(degrees, dtype=float)
    d = d[d >= d_min]
    return 1.0 + d.size / np.log(d / (d_min - 0.5)).sum()


# -- metrics ------------------------------------------------------------------

def _as_vector(est, keys: list, index: dict) -> np.ndarray:
    out = np.zeros(len(keys))
    if isinstance(est, DensityEstimate):
        items = zip(est.label_names, est.values.tolist())
    elif isinstance(est, EdgeDensityEstimate):
        items = est.values.items()
    else:
        items = dict(est).items()
    for k, x in items:
        if k in index:
            out[index[k]] = x
        elif x != 0:
            raise ValueError(f"estimate has mass on label {k!r} absent from the truth")
    return out


def _truth_items(truth):
    if isinstance(truth, DensityEstimate):
        return list(truth.label_names), np.asarray(truth.values, dtype=float)
    d = truth.values if isinstance(truth, EdgeDensityEstimate) else dict(truth)
    keys = sorted(d, key=lambda k: (str(type(k)), k))
    return keys, np.array([d[k] for k in keys], dtype=float)


def ccdf_matrix(keys, mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sorted numeric keys and ``xi_k = sum_{i > k} theta_i`` per row."""
    k = np.array([float(x) for x in keys])
    order = np.argsort(k, kind="stable")
    m = np.atleast_2d(mat)[:, order]
    tail = np.cumsum(m[:, ::-1], axis=1)[:, ::-1]
    xi = np.concatenate([tail[:, 1:], np.zeros((m.shape[0], 1))], axis=1)
    return k[order], np.maximum(xi, 0.0)


def _rms_rel(est: np.ndarray, truth: np.ndarray) -> np.ndarray:
    err = np.sqrt(np.mean((est - truth[None, :]) ** 2, axis=0))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(truth > 0, err / np.where(truth > 0, truth, 1.0), np.nan)


def nmse(estimates, truth) -> list[dict]:
    """Per-label NMSE (and CNMSE for numeric labels) over a list of runs."""
    table = MetricsTable.from_estimates(estimates, truth)
    return table.rows()


def delta(estimate, truth) -> float:
    """Euclidean error between two (joint degree) distributions."""
    keys = set(_truth_items(truth)[0])
    keys.update(_truth_items(estimate)[0])
    keys = sorted(keys, key=lambda k: (str(type(k)), k))
    index = {k: i for i, k in enumerate(keys)}
    return float(np.linalg.norm(_as_vector(estimate, keys, index) - _as_vector(truth, keys, index)))


@dataclass
class MetricsTable:
    """Runs-by-labels estimate matrix with the truth it is scored against."""

    keys: list
    truth: np.ndarray
    estimates: np.ndarray
    floor: float = 0.0
    config: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    @classmethod
    def from_estimates(cls, estimates, truth, floor: float = 0.0, config=None) -> "MetricsTable":
        keys, t = _truth_items(truth)
        index = {k: i for i, k in enumerate(keys)}
        mat = np.array([_as_vector(e, keys, index) for e in estimates]).reshape(len(estimates), len(keys))
        return cls(keys, t, mat, floor, dict(config or {}))

    @property
    def runs(self) -> int:
        return int(self.estimates.shape[0])

    @property
    def numeric(self) -> bool:
        return all(isinstance(k, (int, float, np.integer, np.floating)) and not isinstance(k, bool)
                   for k in self.keys)

    def nmse(self) -> np.ndarray:
        return _rms_rel(self.estimates, self.truth)

    def cnmse(self) -> tuple[np.ndarray, np.ndarray]:
        """Sorted numeric keys and the CNMSE at each (nan where ``xi_k = 0``)."""
        k, xi_t = ccdf_matrix(self.keys, self.truth)
        _, xi_e = ccdf_matrix(self.keys, self.estimates)
        return k, _rms_rel(xi_e, xi_t[0])

    def deltas(self) -> np.ndarray:
        return np.linalg.norm(self.estimates - self.truth[None, :], axis=1)

    def label_nmse(self, label) -> float:
        return float(self.nmse()[self.keys.index(label)])

    def rows(self) -> list[dict]:
        """``label, truth, nmse, cnmse`` for labels with truth above the floor."""
        nm = self.nmse()
        cn = {}
        if self.numeric:
            k, c = self.cnmse()
            cn = dict(zip(k.tolist(), c.tolist()))
        out = []
        skipped = 0
        for i, key in enumerate(self.keys):
            if not self.truth[i] > 0 or self.truth[i] < self.floor:
                skipped += 1
                continue
            c = cn.get(float(key), math.nan) if self.numeric else math.nan
            out.append({"label": key, "truth": float(self.truth[i]), "nmse": float(nm[i]), "cnmse": c})
        if skipped:
            logger.info("skipped %d labels with truth mass below the floor %g", skipped, self.floor)
        return out

    def write(self, outdir) -> dict:
        """Write ``nmse.csv`` and ``runs.csv`` (nonzero estimates only)."""
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        with open(outdir / "nmse.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["label", "truth", "nmse", "cnmse"])
            for r in self.rows():
                w.writerow([_key_text(r["label"]), repr(r["truth"]), repr(r["nmse"]),
                            "" if math.isnan(r["cnmse"]) else repr(r["cnmse"])])
        with open(outdir / "runs.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["run", "label", "estimate"])
            rr, cc = np.nonzero(self.estimates)
            for r, c in zip(rr.tolist(), cc.tolist()):
                w.writerow([r, _key_text(self.keys[c]), repr(float(self.estimates[r, c]))])
        return {"nmse": str(outdir / "nmse.csv"), "runs": str(outdir / "runs.csv")}


def _key_text(k) -> str:
    if isinstance(k, tuple):
        return "|".join(str(x) for x in k)
    return str(k)


# -- trial runner -------------------------------------------------------------

def resolve_budget(spec, n_nodes: int) -> int:
    """``"0.001V"`` is a fraction of |V| (rounded, at least 1); integers pass through."""
    text = str(spec).strip()
    if text.upper().endswith("V"):
        try:
            frac = float(text[:-1])
        except ValueError:
            raise ConfigError(f"bad budget {spec!r}") from None
        b = max(1, int(math.floor(frac * n_nodes + 0.5)))
    else:
        try:
            b = int(text)
        except ValueError:
            raise ConfigError(f"bad budget {spec!r}; use an integer or a fraction like 0.001V") from None
    if b < 1:
        raise ConfigError("budget must resolve to at least 1")
    return b


def run_seed(master: int, run: int) -> int:
    ss = np.random.SeedSequence(int(master), spawn_key=(int(run),))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


NODE_ESTIMATORS = ("simple", "neighbor", "mixture", "directed-neighbor", "out-neighbor")
METHODS = ("uni", "rw", "fs", "wrw")


@dataclass
class TrialConfig:
    method: str = "fs"
    estimator: str = "simple"
    budget: str = "0.001V"
    runs: int = 1000
    seed: int = 1
    visibility: str = "nbr-degrees-labels"
    uni_cost_c: float = 1.0
    charge_seeds: bool = False
    walkers: int = 10
    beta: float = 0.5
    gamma: float = 1.0
    subset_count: int = 100
    mixture_neighbor: str = "undirected"
    labels: str = "degree"
    edge_labeler: str = "degree-pair"
    floor: float = 1e-4
    jobs: int = 1

    @classmethod
    def from_mapping(cls, d: dict) -> "TrialConfig":
        kinds = {f.name: f.type for f in dataclasses.fields(cls)}
        out = {}
        for k, v in d.items():
            k = k.replace("-", "_")
            if k not in kinds:
                raise ConfigError(f"unknown config key {k!r}")
            t = kinds[k]
            if t == "bool" and isinstance(v, str):
                v = v.strip().lower() in ("1", "true", "yes", "on")
            elif t == "int":
                v = int(v)
            elif t == "float":
                v = float(v)
            out[k] = v
        return cls(**out)

    @classmethod
    def from_file(cls, path) -> "TrialConfig":
        d = {}
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                s = line.split("#", 1)[0].strip()
                if not s:
                    continue
                if "=" not in s:
                    raise ConfigError(f"{path}:{lineno}: expected key=value")
                k, v = s.split("=", 1)
                d[k.strip()] = v.strip()
        return cls.from_mapping(d)

    @property
    def is_edge(self) -> bool:
        return self.estimator in EDGE_ESTIMATORS

    def validate(self, g: Graph) -> int:
        """Check the config against the graph and return the resolved budget."""
        if self.runs < 2:
            raise ConfigError("runs must be >= 2")
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}")
        if not self.is_edge and self.estimator not in NODE_ESTIMATORS:
            raise ConfigError(f"unknown estimator {self.estimator!r}")
        vis = Visibility.parse(self.visibility)
        try:
            if self.is_edge:
                caps = {"degree": "nbr_degree", "label": "nbr_label"}
                if self.estimator.startswith("edge-neighbor"):
                    require(vis, *sorted({caps[r] for r in make_labeler(self.edge_labeler, None).requires}),
                            what=f"estimator {self.estimator}")
                elif self.method == "uni":
                    raise ConfigError("traversal estimators need a walk (rw, fs or wrw)")
            else:
                require(vis, *requirements(self.estimator, self.mixture_neighbor),
                        what=f"estimator {self.estimator}")
            if self.method == "wrw":
                require(vis, "nbr_degree", what="weighted random walk")
        except CapabilityError as e:
            raise ConfigError(str(e)) from None
        if self.estimator in ("directed-neighbor", "out-neighbor") and not g.directed:
            raise ConfigError(f"estimator {self.estimator} needs a directed graph")
        return resolve_budget(self.budget, g.node_count)


def make_labels(spec: str, g: Graph) -> LabelTable:
    if spec in ("degree", "in", "out"):
        return degree_labels(g, spec)
    if spec in ("in-degree", "out-degree"):
        return degree_labels(g, spec.split("-")[0])
    return load_labels(spec, g)


def make_labeler(spec: str, labels: LabelTable | None) -> EdgeLabeler:
    if spec == "degree-pair":
        return EdgeLabeler.degree_pair()
    if spec in ("label-pair", "label-pair-directed"):
        if labels is None:
            return EdgeLabeler("label-pair", spec == "label-pair", requires=frozenset({"label"}))
        return EdgeLabeler.label_pair(labels, symmetric=spec == "label-pair")
    raise ConfigError(f"unknown edge labeler {spec!r}")


def draw_stream(g: Graph, cfg: TrialConfig, B: int, seed: int) -> sampling.SampleStream:
    """One budgeted sample stream.

    Walk starts are uniform.  Their UNI cost comes out of the budget only
    with ``charge_seeds``; otherwise the walk gets exactly ``B`` steps.
    """
    vis = Visibility.parse(cfg.visibility)
    c = cfg.uni_cost_c
    if cfg.method == "uni":
        return sampling.uni_sample(g, B, CostLedger(B, c), seed=seed, visibility=vis)
    if cfg.method == "fs":
        ledger = CostLedger(B, c) if cfg.charge_seeds else None
        return sampling.frontier_sample(g, cfg.walkers, B, ledger=ledger, seed=seed, visibility=vis)
    rng = sampling._rng(seed, sampling._UNI_KEY)
    start = int(rng.integers(0, g.node_count))
    ledger = None
    if cfg.charge_seeds:
        ledger = CostLedger(B, c)
        ledger.charge_uni(ledger.uni_costs(1, rng))
    if cfg.method == "rw":
        return sampling.random_walk(g, start, B, ledger=ledger, seed=seed, visibility=vis)
    return sampling.weighted_random_walk(g, start, B, beta=cfg.beta, ledger=ledger, seed=seed,
                                         visibility=vis)


def one_run(g: Graph, cfg: TrialConfig, B: int, seed: int, labels, labeler):
    stream = draw_stream(g, cfg, B, seed)
    if cfg.is_edge:
        return estimate_edge(cfg.estimator, stream, labeler, labels)
    return estimate_node(cfg.estimator, stream, labels, subset_count=cfg.subset_count,
                         neighbor=cfg.mixture_neighbor, gamma=cfg.gamma)


_WORKER: dict = {}


def _init_worker(g, cfg, B, labels, labeler):
    _WORKER.update(g=g, cfg=cfg, B=B, labels=labels, labeler=labeler)


def _worker_run(seed):
    w = _WORKER
    return one_run(w["g"], w["cfg"], w["B"], seed, w["labels"], w["labeler"])


def run_trials(cfg: TrialConfig, g: Graph, labels: LabelTable | None = None,
               truth=None) -> MetricsTable:
    """``cfg.runs`` independent budgeted runs scored against the exact truth."""
    B = cfg.validate(g)
    if labels is None and (not cfg.is_edge or cfg.edge_labeler != "degree-pair"):
        labels = make_labels(cfg.labels, g)
    labeler = make_labeler(cfg.edge_labeler, labels) if cfg.is_edge else None
    if truth is None:
        if cfg.is_edge:
            truth = exact_edge_density(g, labeler, labels, directed=cfg.estimator.endswith("directed"))
        else:
            truth = exact_node_density(g, labels)
    seeds = [run_seed(cfg.seed, r) for r in range(cfg.runs)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs, initializer=_init_worker,
                                 initargs=(g, cfg, B, labels, labeler)) as ex:
            ests = list(ex.map(_worker_run, seeds, chunksize=max(1, cfg.runs // (4 * cfg.jobs))))
    else:
        ests = [one_run(g, cfg, B, s, labels, labeler) for s in seeds]
    resolved = dataclasses.asdict(cfg)
    resolved["budget_resolved"] = B
    table = MetricsTable.from_estimates(ests, truth, floor=cfg.floor, config=resolved)
    logger.info("%d runs of %s/%s at B=%d, NMSE floor %g", cfg.runs, cfg.method, cfg.estimator, B, cfg.floor)
    return table


def central_bins(keys, truth: np.ndarray, lo: float = 0.05, hi: float = 0.95) -> np.ndarray:
    """Sorted numeric labels whose CDF interval overlaps the central mass."""
    k = np.array([float(x) for x in keys])
    order = np.argsort(k, kind="stable")
    t = np.asarray(truth)[order]
    cdf = np.cumsum(t)
    below = cdf - t
    keep = (cdf > lo) & (below < hi) & (t > 0)
    return k[order][keep]


# -- detection and short-path experiments ------------------------------------

def detection_trials(g: Graph, method: str, budget: int, N: int, seeds: int, master_seed: int,
                     beta: float = 1.0, keep_results: bool = False) -> dict:
    """Recall of the exact top-``N`` over ``seeds`` uniform start nodes."""
    truth = exact_top_n(g, N)
    rng = np.random.default_rng(np.random.SeedSequence(int(master_seed), spawn_key=(0xDE7,)))
    starts = rng.choice(np.flatnonzero(g.degree > 0), size=seeds)
    recalls, spent, results = [], [], []
    for i, s in enumerate(starts.tolist()):
        ledger = CostLedger()
        rs = run_seed(master_seed, i)
        if method == "mxs":
            res = mxs_detect(g, s, budget, N, ledger=ledger)
        elif method == "xs":
            res = xs_detect(g, s, budget, N, ledger=ledger)
        elif method == "xs-free":
            res = xs_detect(g, s, budget, N, ledger=ledger, free_frontier=True)
        elif method == "wrw":
            res = wrw_detect(g, s, budget, N, beta=beta, ledger=ledger, seed=rs)
        elif method == "rw":
            res = rw_detect(g, s, budget, N, pool=SAMPLED_PLUS_NEIGHBORHOOD, ledger=ledger, seed=rs)
        elif method == "rw-sampled-only":
            res = rw_detect(g, s, budget, N, pool=SAMPLED_ONLY, ledger=ledger, seed=rs)
        else:
            raise ConfigError(f"unknown detection method {method!r}")
        recalls.append(res.recall(truth))
        if keep_results:
            results.append(res)
        spent.append(res.ledger_snapshot.get("spent", ledger.spent))
    r = np.array(recalls)
    return {"method": method, "budget": budget, "recall_mean": float(r.mean()),
            "recall_std": float(r.std(ddof=1)) if r.size > 1 else 0.0, "seeds": int(r.size),
            "recalls": r, "spent": np.array(spent), "results": results}


def random_pairs(g: Graph, count: int, seed: int) -> np.ndarray:
    """``count`` random ordered pairs ``u != v`` within one component."""
    _, comp = connected_components(g.adjacency_matrix(), directed=False)
    rng = np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(0x9A1,)))
    out = []
    while len(out) < count:
        u, v = rng.integers(0, g.node_count, size=2).tolist()
        if u != v and comp[u] == comp[v] and g.degree[u] > 0:
            out.append((u, v))
    return np.array(out, dtype=np.int64).reshape(-1, 2)


def bfs_distances(g: Graph, u: int) -> np.ndarray:
    """Hop distances from ``u`` on the undirected view (``inf`` if unreachable)."""
    return shortest_path(g.adjacency_matrix(), directed=False, unweighted=True, indices=int(u))


def path_trials(g: Graph, strategies, B: int, pairs: np.ndarray, master_seed: int,
                beta: float = 1.0) -> dict:
    """Short-path discovery for every pair and strategy, with exact distances."""
    results: dict[str, list[PathResult]] = {s: [] for s in strategies}
    for i, (u, v) in enumerate(pairs.tolist()):
        d = true_distance(g, u, v)
        for s in strategies:
            r = discover_short_path(g, u, v, B, s, beta=beta, seed=run_seed(master_seed, i), true_d=d)
            results[s].append(r)
    return results


def path_summary(results: list[PathResult], g: Graph | None = None) -> dict:
    found = np.array([r.found for r in results])
    excess = np.array([r.d_star - r.true_d for r in results if r.found])
    out = {"pairs": len(results), "failure_fraction": float(1 - found.mean()),
           "failure_se": float(math.sqrt(max(found.mean() * (1 - found.mean()), 0) / len(results))),
           "mean_excess": float(excess.mean()) if excess.size else math.nan,
           "excess_se": float(excess.std(ddof=1) / math.sqrt(excess.size)) if excess.size > 1 else 0.0}
    if g is not None:
        out["edge_coverage"] = float(np.mean([r.edges_observed for r in results]) / g.edge_count_undirected)
    return out


def valid_path(g: Graph, path) -> bool:
    p = np.asarray(path, dtype=np.int64)
    return p.size >= 1 and bool(np.all(g.has_edge(p[:-1], p[1:]) | g.has_edge(p[1:], p[:-1])))


# -- spectral diagnostic ------------------------------------------------------

def spectral_alpha(g: Graph) -> dict:
    """Both readings of the mixing constant used by the MSE bound.

    ``laplacian_lambda2`` is the smallest nonzero eigenvalue of the
    normalized Laplacian; ``transition_second`` is the second largest
    eigenvalue of the walk's transition operator, ``1 - lambda2``.
    """
    ncomp, _ = connected_components(g.adjacency_matrix(), directed=False)
    if ncomp != 1:
        raise GraphError("spectral_alpha needs a connected graph")
    A = g.adjacency_matrix().toarray().astype(float)
    dinv = 1.0 / np.sqrt(g.degree.astype(float))
    L = np.eye(g.node_count) - dinv[:, None] * A * dinv[None, :]
    ev = np.linalg.eigvalsh(L)
    lam2 = float(ev[1])
    trans = np.sort(1.0 - ev)[::-1]
    return {"laplacian_lambda2": lam2, "transition_second": float(trans[1]),
            "transition_min": float(trans[-1]), "bipartite": bool(abs(trans[-1] + 1.0) < 1e-9),
            "transition_spectrum": trans}


def lemma2_diagnostic(g: Graph, labels: LabelTable, n: int, R: int, seed: int = 0,
                      walk: str = "rw") -> dict:
    """Monte Carlo MSE of the RW simple estimator against i.i.d.
    degree-proportional sampling with the same estimator.

    The walk starts from the stationary distribution.  ``walk="iid"``
    compares the i.i.d. sampler with itself (ratio exactly 1).
    """
    sa = spectral_alpha(g)
    if sa["bipartite"]:
        raise GraphError("lemma2_diagnostic needs a non-bipartite graph")
    truth = exact_node_density(g, labels).values
    p = g.degree / g.degree.sum()
    lab = labels.node_labels
    w = 1.0 / g.degree.astype(float)

    def est(nodes):
        m = np.bincount(lab[nodes], weights=w[nodes], minlength=labels.K)
        return m / m.sum()

    e_walk, e_iid = np.empty(R), np.empty(R)
    for r in range(R):
        s = run_seed(seed, r)
        rng = np.random.default_rng(np.random.SeedSequence(s, spawn_key=(1,)))
        iid = rng.choice(g.node_count, size=n, p=p)
        e_iid[r] = np.sum((est(iid) - truth) ** 2)
        if walk == "iid":
            e_walk[r] = e_iid[r]
        else:
            start = int(np.random.default_rng(s).choice(g.node_count, p=p))
            nodes = sampling.random_walk(g, start, n, seed=s, visibility=Visibility.SELF_ONLY).nodes
            e_walk[r] = np.sum((est(nodes) - truth) ** 2)
    mw, mi = e_walk.mean(), e_iid.mean()
    ratio = mw / mi
    if walk == "iid":
        se = 0.0
    else:
        se = math.sqrt((e_walk.var(ddof=1) / mi ** 2 + mw ** 2 * e_iid.var(ddof=1) / mi ** 4) / R)
    a_t = sa["transition_second"]
    a_l = sa["laplacian_lambda2"]
    return {"mse_walk": float(mw), "mse_iid": float(mi), "ratio": float(ratio), "ratio_se": se,
            "alpha_transition": a_t, "bound_transition": 1.0 / (1.0 - a_t),
            "alpha_laplacian": a_l, "bound_laplacian": (1.0 / (1.0 - a_l)) if a_l != 1 else math.inf,
            "within_bound": bool(ratio <= 1.0 / (1.0 - a_t) + 3 * se)}


def output_dir(default="out") -> Path:
    return Path(os.environ.get("GRAPHCRAWL_OUTPUT_DIR", default))
