"""UNI, RW, Frontier Sampling and weighted RW samplers.

Every sampler returns a :class:`SampleStream`: the ordered sampled nodes,
the traversed edges (empty for UNI) and the rule used to reweight samples
(the non-normalized stationary weight of a node).

Randomness is derived from a master seed with :class:`numpy.random.SeedSequence`
spawn keys: walker ``k`` owns a move stream ``(k, 0)`` and a clock stream
``(k, 1)``, so adding walkers never changes another walker's path, and a
single-walker FS retraces the RW with the same seed step for step.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .access import CostLedger, NodeReply, ReplyBatch, Visibility, require
from .graph import Graph, GraphError, LabelTable

logger = logging.getLogger(__name__)

UNI, RW, FS, WRW = "UNI", "RW", "FS", "WRW"
_UNI_KEY = 0x554E49

PI_UNIFORM = "uniform"
PI_DEGREE = "degree-proportional"
PI_WEIGHT = "weight-proportional"


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def resolve_seed(seed: int | None) -> int:
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % (2 ** 63))
        logger.info("no seed given, using %d", seed)
    return int(seed)


@dataclass
class SampleStream:
    """Ordered samples ``s_1..s_n`` with their traversed edges.

    ``edge_u[i] -> edge_v[i]`` is the move that produced ``nodes[i]`` (so
    ``edge_v == nodes`` for walks).  Replies are not materialized per sample;
    :meth:`replies` builds a columnar :class:`ReplyBatch` on demand, from the
    graph at this stream's visibility or from recorded replies when the
    stream was read back from disk.
    """

    nodes: np.ndarray
    method: str
    pi_hat_rule: str
    visibility: Visibility
    graph: Graph | None = None
    edge_u: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    edge_v: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    seed: int | None = None
    beta: float = 0.0
    directed_weights: bool = False
    exhausted: bool = False
    walker: np.ndarray | None = None
    recorded: dict | None = None
    recorded_edges: dict | None = None
    directed: bool | None = None

    def __post_init__(self):
        if self.directed is None:
            self.directed = bool(self.graph.directed) if self.graph is not None else False

    def __len__(self):
        return int(self.nodes.size)

    @property
    def traversed_edges(self) -> list[tuple[int, int]]:
        return list(zip(self.edge_u.tolist(), self.edge_v.tolist()))

    @classmethod
    def from_nodes(cls, g: Graph, nodes, method: str = UNI, visibility=Visibility.NBR_DEGREES_LABELS,
                   edges=None, **kw) -> "SampleStream":
        """A stream over explicitly given nodes (for replay and hand checks)."""
        nodes = np.asarray(nodes, dtype=np.int64)
        method = method.upper()
        rule = {UNI: PI_UNIFORM, RW: PI_DEGREE, FS: PI_DEGREE, WRW: PI_WEIGHT}[method]
        eu = ev = np.zeros(0, np.int64)
        if edges is not None:
            arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
            eu, ev = arr[:, 0], arr[:, 1]
        return cls(nodes, method, rule, Visibility.parse(visibility), g, eu, ev, **kw)

    def segment(self, start: int, stop: int) -> "SampleStream":
        has_edges = self.edge_u.size == self.nodes.size
        rec = self.recorded_edges
        if rec is not None:
            rec = {k: v[start:stop] for k, v in rec.items()}
        return replace(self, nodes=self.nodes[start:stop], recorded_edges=rec,
                       edge_u=self.edge_u[start:stop] if has_edges else self.edge_u[:0],
                       edge_v=self.edge_v[start:stop] if has_edges else self.edge_v[:0],
                       walker=None if self.walker is None else self.walker[start:stop])

    # -- replies ----------------------------------------------------------

    def replies(self, labels: LabelTable | None = None) -> ReplyBatch:
        uniq, mult = np.unique(self.nodes, return_counts=True)
        if self.recorded is not None:
            reps = [self.recorded[int(v)] for v in uniq]
            return ReplyBatch.from_replies(reps, mult, self.visibility, self.directed)
        if self.graph is None:
            raise GraphError("stream has neither a graph nor recorded replies")
        if labels is not None and len(labels) != self.graph.node_count:
            raise GraphError("label table does not cover the graph")
        return ReplyBatch.from_graph(self.graph, uniq, mult, self.visibility, labels)

    def reply(self, i: int, labels: LabelTable | None = None) -> NodeReply:
        v = int(self.nodes[i])
        if self.recorded is not None:
            return self.recorded[v]
        return ReplyBatch.from_graph(self.graph, np.array([v]), np.array([1]), self.visibility,
                                     labels).reply(0)

    def pi_hat(self, batch: ReplyBatch) -> np.ndarray:
        """Non-normalized stationary weight of each batch row."""
        if self.pi_hat_rule == PI_UNIFORM:
            return np.ones(len(batch))
        if self.pi_hat_rule == PI_DEGREE:
            return batch.degree.astype(float)
        if self.pi_hat_rule == PI_WEIGHT:
            require(batch.visibility, "nbr_degree", what="weighted-walk reweighting")
            if self.directed_weights:
                own = (batch.in_degree + batch.out_degree).astype(float)
                nb = (batch.nbr_in_degree + batch.nbr_out_degree).astype(float)
            else:
                own = batch.degree.astype(float)
                nb = batch.nbr_degree.astype(float)
            s = np.bincount(batch.row, weights=nb ** self.beta, minlength=len(batch))
            return own ** self.beta * s
        raise ValueError(f"unknown pi_hat rule {self.pi_hat_rule!r}")

    def edge_directions(self) -> tuple[np.ndarray, np.ndarray]:
        """For each traversed edge: is ``u -> v`` in E_d, is ``v -> u`` in E_d."""
        if self.recorded_edges is not None:
            flags = self.recorded_edges["flags"]
            return (flags & 1).astype(bool), (flags & 2).astype(bool)
        g = self.graph
        return g.has_edge(self.edge_u, self.edge_v), g.has_edge(self.edge_v, self.edge_u)

    def edge_endpoint_attrs(self, labels: LabelTable | None = None) -> tuple[dict, dict]:
        """Own attributes of both endpoints of every traversed edge.

        Both endpoints of a walk step were queried by the walker, so this
        needs no neighbor visibility.
        """
        if self.recorded_edges is not None:
            ra = self.recorded_edges
            return ({"degree": ra["du"], "label": ra["lu"]}, {"degree": ra["dv"], "label": ra["lv"]})
        g = self.graph
        u, v = self.edge_u, self.edge_v
        a = {"degree": g.degree[u], "in_degree": g.in_degree[u], "out_degree": g.out_degree[u]}
        b = {"degree": g.degree[v], "in_degree": g.in_degree[v], "out_degree": g.out_degree[v]}
        if labels is not None:
            a["label"] = labels.node_labels[u]
            b["label"] = labels.node_labels[v]
        return a, b


def _require_walkable(g: Graph, nodes) -> None:
    nodes = np.atleast_1d(np.asarray(nodes, dtype=np.int64))
    if nodes.size and (nodes.min() < 0 or nodes.max() >= g.node_count):
        raise GraphError("start node outside graph")
    bad = nodes[g.degree[nodes] == 0]
    if bad.size:
        raise GraphError(f"start node {int(bad[0])} is isolated")


def uni_sample(g: Graph, count: int, ledger: CostLedger | None = None, seed: int | None = None,
               visibility=Visibility.NBR_DEGREES_LABELS) -> SampleStream:
    """``count`` uniform nodes with replacement, each charged the UNI cost."""
    seed = resolve_seed(seed)
    ledger = ledger if ledger is not None else CostLedger()
    rng = _rng(seed, _UNI_KEY)
    nodes = rng.integers(0, g.node_count, size=count)
    delivered = ledger.charge_uni(ledger.uni_costs(count, rng))
    return SampleStream(nodes[:delivered].astype(np.int64), UNI, PI_UNIFORM, Visibility.parse(visibility),
                        g, seed=seed, exhausted=delivered < count)


def random_walk(g: Graph, start: int, n: int, ledger: CostLedger | None = None, seed: int | None = None,
                visibility=Visibility.NBR_DEGREES_LABELS, cache: bool = False) -> SampleStream:
    """Simple random walk of ``n`` steps on the undirected view.

    The start node is given, not sampled; each step is charged one query
    (only first visits when ``cache`` is on).
    """
    seed = resolve_seed(seed)
    _require_walkable(g, start)
    u = _rng(seed, 0, 0).random(n)
    path = _kernels.walk(g.und_indptr, g.und_indices, int(start), u)
    k = _charge(ledger, path, cache)
    path = path[:k]
    prev = np.concatenate([[start], path[:-1]]).astype(np.int64) if k else path
    return SampleStream(path, RW, PI_DEGREE, Visibility.parse(visibility), g, prev, path.copy(),
                        seed=seed, exhausted=k < n)


def _charge(ledger: CostLedger | None, path: np.ndarray, cache: bool) -> int:
    n = path.size
    if ledger is None:
        return n
    if not cache:
        k = ledger.affordable_crawls(n)
        ledger.charge_crawl(k)
    else:
        # only first visits cost a query
        _, first = np.unique(path, return_index=True)
        new = np.zeros(n, dtype=np.int64)
        new[first] = 1
        cost = np.cumsum(new)
        k = int(np.searchsorted(cost, ledger.remaining + 1e-9, side="right"))
        if k:
            ledger.charge_crawl(int(cost[k - 1]))
    if k < n:
        ledger.exhausted = True
    return k


def frontier_sample(g: Graph, m: int, n: int, seeds=None, ledger: CostLedger | None = None,
                    seed: int | None = None, visibility=Visibility.NBR_DEGREES_LABELS) -> SampleStream:
    """Frontier Sampling with ``m`` walkers, returning exactly ``n`` samples.

    Walker ``k`` at node ``u`` waits an Exp(d_u) time before moving to a
    uniform neighbor; the merged stream lists moves in time order, which is
    the same as repeatedly picking a walker with probability proportional
    to its current degree.  Without ``seeds`` the walkers start at ``m``
    UNI samples, each charged the UNI cost.
    """
    if m < 1:
        raise ValueError("need at least one walker")
    seed = resolve_seed(seed)
    ledger = ledger if ledger is not None else CostLedger()
    if seeds is None:
        rng = _rng(seed, _UNI_KEY)
        starts = rng.integers(0, g.node_count, size=m)
        got = ledger.charge_uni(ledger.uni_costs(m, rng))
        starts = starts[:got]
    else:
        starts = np.asarray(seeds, dtype=np.int64)
        if starts.size != m:
            raise ValueError("len(seeds) must equal m")
    vis = Visibility.parse(visibility)
    if starts.size == 0:
        empty = np.zeros(0, np.int64)
        return SampleStream(empty, FS, PI_DEGREE, vis, g, empty, empty, seed=seed, exhausted=True)
    _require_walkable(g, starts)
    if n < starts.size:
        logger.warning("fewer samples (%d) than walkers (%d)", n, starts.size)
    k = ledger.affordable_crawls(n)
    ledger.charge_crawl(k)
    nodes, prev, walker = _fs_merge(g, starts, k, seed)
    return SampleStream(nodes, FS, PI_DEGREE, vis, g, prev, nodes.copy(), seed=seed,
                        exhausted=k < n, walker=walker)


def _fs_merge(g: Graph, starts: np.ndarray, n: int, seed: int):
    m = starts.size
    deg = g.degree.astype(float)
    movers = [_rng(seed, k, 0) for k in range(m)]
    clocks = [_rng(seed, k, 1) for k in range(m)]
    paths: list[list[np.ndarray]] = [[] for _ in range(m)]
    prevs: list[list[np.ndarray]] = [[] for _ in range(m)]
    times: list[list[np.ndarray]] = [[] for _ in range(m)]
    cur = starts.astype(np.int64).copy()
    last_t = np.zeros(m)
    size = np.full(m, max(8, math.ceil(1.25 * n / m) + 4), dtype=np.int64)

    def extend(k):
        L = int(size[k])
        u = movers[k].random(L)
        e = clocks[k].standard_exponential(L)
        path = _kernels.walk(g.und_indptr, g.und_indices, int(cur[k]), u)
        prev = np.empty(L, dtype=np.int64)
        prev[0] = cur[k]
        prev[1:] = path[:-1]
        t = last_t[k] + np.cumsum(e / deg[prev])
        paths[k].append(path)
        prevs[k].append(prev)
        times[k].append(t)
        cur[k] = path[-1]
        last_t[k] = t[-1]
        size[k] *= 2

    if n == 0:
        z = np.zeros(0, np.int64)
        return z, z, z
    for k in range(m):
        extend(k)
    while True:
        all_t = np.concatenate([np.concatenate(t) for t in times])
        horizon = np.partition(all_t, n - 1)[n - 1] if all_t.size >= n else np.inf
        lagging = np.flatnonzero(last_t < horizon)
        if lagging.size == 0:
            break
        for k in lagging:
            extend(k)
    t = np.concatenate([np.concatenate(x) for x in times])
    nodes = np.concatenate([np.concatenate(x) for x in paths])
    prev = np.concatenate([np.concatenate(x) for x in prevs])
    walker = np.concatenate([np.full(sum(c.size for c in times[k]), k, dtype=np.int64) for k in range(m)])
    order = np.argsort(t, kind="stable")[:n]
    return nodes[order], prev[order], walker[order]


@functools.lru_cache(maxsize=16)
def _edge_cumweights(g: Graph, beta: float, directed_weights: bool) -> np.ndarray:
    f = (g.in_degree + g.out_degree) if directed_weights else g.degree
    w = f[g.und_indices].astype(float) ** beta
    return _kernels.row_cumsum(g.und_indptr, w)


def weighted_random_walk(g: Graph, start: int, n: int, beta: float = 0.5, directed_weights: bool = False,
                         ledger: CostLedger | None = None, seed: int | None = None,
                         visibility=Visibility.NBR_DEGREES_LABELS, cache: bool = False) -> SampleStream:
    """Weighted RW with ``w(u, v) = (d_u d_v)^beta``.

    With ``directed_weights`` the degrees are ``d^(I) + d^(O)``.  The walk
    still moves on the undirected view.  Choosing the next hop needs the
    neighbors' degrees, so the visibility must grant them.
    """
    vis = Visibility.parse(visibility)
    require(vis, "nbr_degree", what="weighted random walk")
    seed = resolve_seed(seed)
    _require_walkable(g, start)
    u = _rng(seed, 0, 0).random(n)
    cumw = _edge_cumweights(g, float(beta), bool(directed_weights))
    path = _kernels.weighted_walk(g.und_indptr, g.und_indices, cumw, int(start), u)
    k = _charge(ledger, path, cache)
    path = path[:k]
    prev = np.concatenate([[start], path[:-1]]).astype(np.int64) if k else path
    return SampleStream(path, WRW, PI_WEIGHT, vis, g, prev, path.copy(), seed=seed, beta=float(beta),
                        directed_weights=bool(directed_weights), exhausted=k < n)


# -- record files -------------------------------------------------------------

def _tok(x):
    return "-" if x is None else str(x)


def write_stream(path, stream: SampleStream, labels: LabelTable | None = None) -> None:
    """Write ``S`` (sample) and ``E`` (traversed edge) records.

    ``S node label degree in_degree out_degree nbr...`` where each neighbor
    token is ``id/dir/deg/indeg/outdeg/label`` (``dir`` bit 1: out-edge,
    bit 2: in-edge; ``-`` marks fields the visibility withholds).  A node
    seen before is written as the bare back-reference ``S node``.
    ``E u v dir deg_u deg_v label_u label_v`` follows each sample of a walk.
    """
    names = labels.label_names if labels is not None else None

    def lname(i):
        return "-" if (names is None or i is None or i < 0) else str(names[i]).replace(" ", "_")

    batch = stream.replies(labels)
    rows = {int(v): r for r, v in enumerate(batch.nodes.tolist())}
    has_edges = stream.edge_u.size == stream.nodes.size and stream.edge_u.size > 0
    if has_edges:
        fwd, bwd = stream.edge_directions()
        ea, eb = stream.edge_endpoint_attrs(labels)
    seen = set()
    with open(path, "w") as fh:
        fh.write(f"# method={stream.method} pi_hat_rule={stream.pi_hat_rule} seed={stream.seed} "
                 f"visibility={stream.visibility.value} beta={stream.beta} "
                 f"directed_weights={int(stream.directed_weights)} directed={int(stream.directed)} "
                 f"exhausted={int(stream.exhausted)}\n")
        for i, v in enumerate(stream.nodes.tolist()):
            if v in seen:
                fh.write(f"S {v}\n")
            else:
                seen.add(v)
                rep = batch.reply(rows[v])
                toks = []
                for j, w in enumerate(rep.neighbors.tolist()):
                    d = int(rep.nbr_out[j]) | (int(rep.nbr_in[j]) << 1)
                    nd = rep._nbr_degree
                    ni = rep._nbr_in_degree
                    no = rep._nbr_out_degree
                    nl = rep._nbr_label
                    toks.append("/".join([str(w), str(d),
                                          _tok(None if nd is None else int(nd[j])),
                                          _tok(None if ni is None or ni[j] < 0 else int(ni[j])),
                                          _tok(None if no is None else int(no[j])),
                                          lname(None if nl is None else int(nl[j]))]))
                fh.write(f"S {v} {lname(rep.label)} {rep.degree} {rep.in_degree} {rep.out_degree} "
                         + " ".join(toks) + "\n")
            if has_edges:
                d = int(fwd[i]) | (int(bwd[i]) << 1)
                lu = ea.get("label")
                lv = eb.get("label")
                fh.write(f"E {int(stream.edge_u[i])} {int(stream.edge_v[i])} {d} "
                         f"{int(ea['degree'][i])} {int(eb['degree'][i])} "
                         f"{lname(None if lu is None else int(lu[i]))} "
                         f"{lname(None if lv is None else int(lv[i]))}\n")


def read_stream(path, labels: LabelTable) -> SampleStream:
    """Read a record file back into a graph-free stream.

    ``labels`` supplies the label-name space (see :meth:`LabelTable.space`).
    """
    def lid(tok):
        if tok == "-":
            return None
        try:
            return labels.index(tok)
        except KeyError:
            for k, name in enumerate(labels.label_names):
                if str(name).replace(" ", "_") == tok:
                    return k
            raise

    def num(tok):
        return None if tok == "-" else int(tok)

    meta: dict[str, str] = {}
    nodes: list[int] = []
    recorded: dict[int, NodeReply] = {}
    eu, ev, flags, du, dv, lu, lv = [], [], [], [], [], [], []
    vis = Visibility.NBR_DEGREES_LABELS
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "#":
                meta.update(p.split("=", 1) for p in parts[1:])
                vis = Visibility.parse(meta["visibility"])
                continue
            if parts[0] == "S":
                v = int(parts[1])
                nodes.append(v)
                if len(parts) == 2:
                    continue
                nb = [t.split("/") for t in parts[6:]]
                ids = np.array([int(t[0]) for t in nb], dtype=np.int64)
                d = np.array([int(t[1]) for t in nb], dtype=np.int64)

                def col(idx, conv):
                    vals = [conv(t[idx]) for t in nb]
                    if vals and all(x is None for x in vals):
                        return None
                    return np.array([-1 if x is None else x for x in vals], dtype=np.int64)

                recorded[v] = NodeReply(v, lid(parts[2]), int(parts[3]), int(parts[4]), int(parts[5]),
                                        ids, (d & 1).astype(bool), (d & 2).astype(bool), vis,
                                        col(2, num), col(3, num), col(4, num), col(5, lid))
            elif parts[0] == "E":
                eu.append(int(parts[1]))
                ev.append(int(parts[2]))
                flags.append(int(parts[3]))
                du.append(int(parts[4]))
                dv.append(int(parts[5]))
                lu.append(-1 if lid(parts[6]) is None else lid(parts[6]))
                lv.append(-1 if lid(parts[7]) is None else lid(parts[7]))
    method = meta.get("method", UNI)
    seed = meta.get("seed")
    return SampleStream(
        np.array(nodes, dtype=np.int64), method, meta.get("pi_hat_rule", PI_UNIFORM), vis, None,
        np.array(eu, dtype=np.int64), np.array(ev, dtype=np.int64),
        seed=None if seed in (None, "None") else int(seed), beta=float(meta.get("beta", 0.0)),
        directed_weights=bool(int(meta.get("directed_weights", 0))),
        exhausted=bool(int(meta.get("exhausted", 0))), recorded=recorded,
        recorded_edges={"flags": np.array(flags, dtype=np.int64), "du": np.array(du), "dv": np.array(dv),
                        "lu": np.array(lu), "lv": np.array(lv)} if eu else None,
        directed=bool(int(meta.get("directed", 0))))
