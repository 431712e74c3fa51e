"""Short-path discovery on the subgraph seen by two budgeted crawls.

One crawl starts at each endpoint.  Their sampled sets are merged into S
and the observed graph G* keeps every edge with an endpoint in S, which any
reply reveals (a reply always lists neighbor ids).  The path is a BFS in
G*, so it is a real path in the graph and never shorter than the true
distance.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import breadth_first_order

from .access import CostLedger, Visibility
from .detection import mxs_detect
from .graph import Graph, GraphError
from .sampling import SampleStream, random_walk, weighted_random_walk

STRATEGIES = ("RW", "WRW", "MXS")


@dataclass
class ObservedGraph:
    sampled: np.ndarray          # S, sorted
    nodes: np.ndarray            # V* = S ∪ N(S), sorted
    edge_u: np.ndarray           # E*, each pair once with u < v
    edge_v: np.ndarray
    origin: tuple = ()

    def __post_init__(self):
        a = np.concatenate([self.edge_u, self.edge_v])
        b = np.concatenate([self.edge_v, self.edge_u])
        order = np.lexsort((b, a))
        a, self._nbr = a[order], b[order]
        self._keys, start = np.unique(a, return_index=True)
        self._ptr = np.append(start, a.size)

    @property
    def edge_count(self) -> int:
        return int(self.edge_u.size)

    def neighbors(self, v: int) -> np.ndarray:
        i = int(np.searchsorted(self._keys, v))
        if i == self._keys.size or self._keys[i] != v:
            return np.zeros(0, np.int64)
        return self._nbr[self._ptr[i]:self._ptr[i + 1]]

    def bfs_path(self, u: int, v: int) -> list[int] | None:
        """Shortest ``u``-``v`` path in G*; neighbors are expanded in id order."""
        u, v = int(u), int(v)
        if u == v:
            return [u]
        parent = {u: u}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            for y in self.neighbors(x).tolist():
                if y in parent:
                    continue
                parent[y] = x
                if y == v:
                    path = [v]
                    while path[-1] != u:
                        path.append(parent[path[-1]])
                    return path[::-1]
                queue.append(y)
        return None


@dataclass
class PathResult:
    u: int
    v: int
    found: bool
    path: list[int]
    d_star: float
    strategy: str
    B: int
    true_d: float | None = None
    edges_observed: int = 0

    def csv_row(self) -> dict:
        return {"u": self.u, "v": self.v, "true_d": "" if self.true_d is None else _num(self.true_d),
                "d_star": _num(self.d_star), "found": int(self.found), "strategy": self.strategy, "B": self.B}


def _num(x):
    return "inf" if math.isinf(x) else int(x)


def observed_graph(streams, g: Graph) -> ObservedGraph:
    """G* from the union of the streams' sampled nodes.

    ``streams`` may hold :class:`SampleStream` objects or plain node arrays.
    """
    sets = [np.unique(s.nodes if isinstance(s, SampleStream) else np.asarray(s, np.int64)) for s in streams]
    if not sets:
        raise GraphError("observed_graph needs at least one stream")
    S = np.unique(np.concatenate(sets)).astype(np.int64)
    ip, ix = g.und_indptr, g.und_indices
    deg = ip[S + 1] - ip[S]
    src = np.repeat(S, deg)
    dst = np.concatenate([ix[ip[s]:ip[s + 1]] for s in S]) if S.size else np.zeros(0, np.int64)
    lo, hi = np.minimum(src, dst), np.maximum(src, dst)
    keys = np.unique(lo * g.node_count + hi)
    eu, ev = keys // g.node_count, keys % g.node_count
    nodes = np.union1d(S, dst)
    return ObservedGraph(S, nodes, eu, ev, tuple(sets))


def edge_coverage(obs: ObservedGraph, g: Graph) -> float:
    return obs.edge_count / max(g.edge_count_undirected, 1)


def true_distance(g: Graph, u: int, v: int) -> float:
    """Exact hop distance by BFS on the undirected view (``inf`` if none)."""
    order, pred = breadth_first_order(g.adjacency_matrix(), int(u), directed=False)
    if int(v) == int(u):
        return 0.0
    if pred[int(v)] < 0:
        return math.inf
    d, x = 0, int(v)
    while x != int(u):
        x = int(pred[x])
        d += 1
    return float(d)


def crawl_set(g: Graph, start: int, B: int, strategy: str, beta: float = 1.0, seed: int | None = None,
              ledger: CostLedger | None = None) -> np.ndarray:
    """Nodes sampled by one crawl of ``B`` steps (start included, start charged)."""
    strategy = strategy.upper()
    if strategy == "MXS":
        res = mxs_detect(g, start, B, N=0, ledger=ledger)
        return np.asarray(res.sampled, dtype=np.int64)
    if ledger is not None:
        ledger.charge_crawl(1)
    if strategy == "RW":
        s = random_walk(g, start, B, ledger=ledger, seed=seed, visibility=Visibility.SELF_ONLY)
    elif strategy == "WRW":
        s = weighted_random_walk(g, start, B, beta=beta, ledger=ledger, seed=seed,
                                 visibility=Visibility.NBR_DEGREES)
    else:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    return np.concatenate([[start], s.nodes]).astype(np.int64)


def discover_short_path(g: Graph, u: int, v: int, B: int, strategy: str = "MXS", beta: float = 1.0,
                        ledger: CostLedger | None = None, seed: int | None = None,
                        true_d: float | None = None) -> PathResult:
    """Run ``strategy`` from ``u`` and from ``v`` (``B`` steps each), merge
    the sampled sets only at the end, and BFS in the observed graph."""
    u, v = int(u), int(v)
    if u == v:
        raise GraphError("u and v must differ")
    for x in (u, v):
        if g.degree[x] == 0:
            raise GraphError(f"node {x} is isolated")
    ss = np.random.SeedSequence(0 if seed is None else int(seed))
    su, sv = (int(c.generate_state(1, np.uint64)[0] >> np.uint64(1)) for c in ss.spawn(2))
    a = crawl_set(g, u, B, strategy, beta, su, ledger)
    b = crawl_set(g, v, B, strategy, beta, sv, ledger)
    obs = observed_graph([a, b], g)
    path = obs.bfs_path(u, v)
    found = path is not None
    return PathResult(u, v, found, path or [], float(len(path) - 1) if found else math.inf,
                      strategy.upper(), int(B), true_d, obs.edge_count)
