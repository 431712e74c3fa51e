"""Immutable graphs with directed and undirected views.

Adjacency is stored in CSR form (``indptr``/``indices`` numpy arrays) with
each neighbor list sorted, so membership tests are binary searches and all
outputs are deterministic.  Node ids are dense ``0..n-1``; the id a node had
in its source file is kept in ``Graph.original_ids``.
"""

from __future__ import annotations

import csv
import gzip
import logging
import os
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

logger = logging.getLogger(__name__)


class GraphError(ValueError):
    """Raised for malformed graph input or degenerate parameters."""


class EdgeListParseError(GraphError):
    def __init__(self, path, lineno, line):
        super().__init__(f"{path}:{lineno}: expected two non-negative integer ids, got {line!r}")
        self.lineno = lineno


def _csr(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # src/dst must already be sorted by (src, dst)
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, dst.astype(np.int64, copy=True)


class Graph:
    """A simple graph with an undirected view and, if directed, in/out views.

    Build with :meth:`from_edges`; the constructor expects already
    deduplicated sorted CSR arrays.  For an undirected graph the out-, in-
    and undirected views are the same arrays, and ``edge_count_directed``
    is ``2 * edge_count_undirected`` (each edge in both directions).
    """

    def __init__(self, n, directed, out_indptr, out_indices, in_indptr, in_indices,
                 und_indptr, und_indices, original_ids=None, load_report=None):
        self.node_count = int(n)
        self.directed = bool(directed)
        self.out_indptr, self.out_indices = out_indptr, out_indices
        self.in_indptr, self.in_indices = in_indptr, in_indices
        self.und_indptr, self.und_indices = und_indptr, und_indices
        if original_ids is None:
            original_ids = np.arange(n, dtype=np.int64)
        self.original_ids = np.asarray(original_ids, dtype=np.int64)
        self.load_report = dict(load_report or {})

        self.degree = np.diff(und_indptr)
        self.out_degree = np.diff(out_indptr)
        self.in_degree = np.diff(in_indptr)
        self.edge_count_undirected = int(und_indices.size // 2)
        self.edge_count_directed = int(out_indices.size)
        # sorted keys u*n+v of E_d for vectorized membership
        rows = np.repeat(np.arange(n, dtype=np.int64), self.out_degree)
        self._directed_keys = rows * max(n, 1) + out_indices
        for arr in (out_indptr, out_indices, in_indptr, in_indices, und_indptr, und_indices,
                    self.degree, self.out_degree, self.in_degree, self._directed_keys,
                    self.original_ids):
            arr.flags.writeable = False

    # -- construction -----------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, src, dst, directed: bool, original_ids=None) -> "Graph":
        """Build a graph on ``n`` nodes, dropping self-loops and duplicates.

        Duplicates are duplicate ordered pairs for a directed graph and
        duplicate unordered pairs for an undirected one.  Drop counts are
        logged and kept in ``load_report``.
        """
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise GraphError("src and dst must have equal length")
        if n < 0 or (src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n)):
            raise GraphError("edge endpoint outside 0..n-1")
        loops = src == dst
        n_loops = int(loops.sum())
        src, dst = src[~loops], dst[~loops]
        if not directed:
            src, dst = np.minimum(src, dst), np.maximum(src, dst)
        keys = np.unique(src * max(n, 1) + dst)
        n_dups = int(src.size - keys.size)
        src, dst = keys // max(n, 1), keys % max(n, 1)
        if n_loops or n_dups:
            logger.info("dropped %d self-loops and %d duplicate edges", n_loops, n_dups)
        report = {"self_loops_dropped": n_loops, "duplicates_dropped": n_dups}

        if directed:
            out_indptr, out_indices = _csr(n, src, dst)
            order = np.lexsort((src, dst))
            in_indptr, in_indices = _csr(n, dst[order], src[order])
            a = np.concatenate([src, dst])
            b = np.concatenate([dst, src])
            ukeys = np.unique(a * max(n, 1) + b)
            und_indptr, und_indices = _csr(n, ukeys // max(n, 1), ukeys % max(n, 1))
        else:
            a = np.concatenate([src, dst])
            b = np.concatenate([dst, src])
            ukeys = np.sort(a * max(n, 1) + b)
            und_indptr, und_indices = _csr(n, ukeys // max(n, 1), ukeys % max(n, 1))
            out_indptr, out_indices = und_indptr, und_indices
            in_indptr, in_indices = und_indptr, und_indices
        return cls(n, directed, out_indptr, out_indices, in_indptr, in_indices,
                   und_indptr, und_indices, original_ids=original_ids, load_report=report)

    # -- accessors --------------------------------------------------------

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return (f"Graph({kind}, n={self.node_count}, |E|={self.edge_count_undirected}, "
                f"|E_d|={self.edge_count_directed})")

    def neighbors(self, v: int) -> np.ndarray:
        """Undirected neighbor ids of ``v`` (N(v) = in ∪ out), sorted."""
        return self.und_indices[self.und_indptr[v]:self.und_indptr[v + 1]]

    def out_neighbors(self, v: int) -> np.ndarray:
        return self.out_indices[self.out_indptr[v]:self.out_indptr[v + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        return self.in_indices[self.in_indptr[v]:self.in_indptr[v + 1]]

    def has_edge(self, u, v):
        """Membership in E_d (for undirected graphs, in E).  Vectorized."""
        n = max(self.node_count, 1)
        keys = np.asarray(u, dtype=np.int64) * n + np.asarray(v, dtype=np.int64)
        pos = np.searchsorted(self._directed_keys, keys)
        pos = np.minimum(pos, max(self._directed_keys.size - 1, 0))
        if self._directed_keys.size == 0:
            hit = np.zeros(np.shape(keys), dtype=bool)
        else:
            hit = self._directed_keys[pos] == keys
        return bool(hit) if np.ndim(hit) == 0 else hit

    def edges(self, directed: bool | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Edge arrays ``(src, dst)``: E_d if directed, else E with ``src < dst``."""
        if directed is None:
            directed = self.directed
        if directed:
            rows = np.repeat(np.arange(self.node_count, dtype=np.int64), self.out_degree)
            return rows, self.out_indices.copy()
        rows = np.repeat(np.arange(self.node_count, dtype=np.int64), self.degree)
        keep = rows < self.und_indices
        return rows[keep], self.und_indices[keep]

    def adjacency_matrix(self):
        """Undirected view as a scipy CSR matrix (shares the index arrays)."""
        n = self.node_count
        return csr_matrix((np.ones(self.und_indices.size, dtype=np.int8), self.und_indices, self.und_indptr),
                          shape=(n, n))

    def subgraph(self, nodes) -> "Graph":
        """Induced subgraph on ``nodes`` (relabelled in ascending id order)."""
        nodes = np.unique(np.asarray(nodes, dtype=np.int64))
        remap = np.full(self.node_count, -1, dtype=np.int64)
        remap[nodes] = np.arange(nodes.size)
        src, dst = self.edges(directed=self.directed)
        keep = (remap[src] >= 0) & (remap[dst] >= 0)
        g = Graph.from_edges(nodes.size, remap[src[keep]], remap[dst[keep]], self.directed,
                             original_ids=self.original_ids[nodes])
        g.load_report = dict(self.load_report)
        return g

    def stats(self) -> dict:
        return {
            "nodes": self.node_count,
            "directed": self.directed,
            "edges": self.edge_count_undirected,
            "directed_edges": self.edge_count_directed if self.directed else None,
            "max_degree": int(self.degree.max()) if self.node_count else 0,
            "mean_degree": float(self.degree.mean()) if self.node_count else 0.0,
            **self.load_report,
        }

    def write_id_map(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["original_id", "dense_id"])
            for dense, orig in enumerate(self.original_ids.tolist()):
                w.writerow([orig, dense])


def _open_text(path):
    if str(path).endswith(".gz"):
        return gzip.open(path, "rt")
    return open(path)


def load_edge_list(path, directed: bool) -> Graph:
    """Read a whitespace separated ``u v`` edge list ('#' lines are comments).

    Node ids are compacted to ``0..n-1`` in ascending order of original id.
    Self-loops and duplicates are dropped and counted in ``load_report``.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    src, dst = [], []
    with _open_text(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) < 2 or not (parts[0].isdigit() and parts[1].isdigit()):
                raise EdgeListParseError(path, lineno, line.rstrip("\n"))
            src.append(int(parts[0]))
            dst.append(int(parts[1]))
    if not src:
        raise GraphError(f"{path}: empty graph")
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    ids, inv = np.unique(np.concatenate([src, dst]), return_inverse=True)
    m = src.size
    g = Graph.from_edges(ids.size, inv[:m], inv[m:], directed, original_ids=ids)
    logger.info("loaded %s: %r", path, g)
    return g


def largest_connected_component(g: Graph) -> Graph:
    """Induced subgraph on the largest component of the undirected view.

    Ties between equally large components go to the one holding the smallest
    original node id.
    """
    n = g.node_count
    if n == 0:
        return g
    ncomp, comp = connected_components(g.adjacency_matrix(), directed=False)
    sizes = np.bincount(comp, minlength=ncomp)
    min_orig = np.full(ncomp, np.iinfo(np.int64).max)
    np.minimum.at(min_orig, comp, g.original_ids)
    best = np.lexsort((min_orig, -sizes))[0]
    nodes = np.flatnonzero(comp == best)
    if nodes.size == n:
        return g
    out = g.subgraph(nodes)
    out.load_report["lcc_fraction"] = nodes.size / n
    return out


# -- synthetic graphs -------------------------------------------------------

def power_law_degrees(n: int, exponent: float, rng: np.random.Generator, d_min: int = 2,
                      d_max: int | None = None) -> np.ndarray:
    """Discrete power-law degree sequence P(d) ~ d^-exponent for d >= d_min."""
    d_max = n - 1 if d_max is None else d_max
    # continuous Pareto rounded down from d_min - 1/2, the usual discrete approximation
    u = rng.random(n)
    d = np.floor((d_min - 0.5) * (1.0 - u) ** (-1.0 / (exponent - 1.0)) + 0.5).astype(np.int64)
    return np.clip(d, d_min, d_max)


def generate_synthetic(kind: str, n: int, param: float, seed: int, d_min: int = 2) -> Graph:
    """Seeded simple undirected graph.

    ``kind="erdos-renyi"``: G(n, p) with ``p = param``.
    ``kind="configuration-power-law"``: erased configuration model over a
    power-law degree sequence with exponent ``param`` in (2, 3.5].
    The LCC fraction is stored in ``load_report["lcc_fraction"]``.
    """
    if n < 3:
        raise GraphError("n must be >= 3")
    rng = np.random.default_rng(seed)
    if kind == "erdos-renyi":
        p = float(param)
        if not 0.0 < p <= 1.0:
            raise GraphError("edge probability must lie in (0, 1]")
        total = n * (n - 1) // 2
        if p == 1.0:
            idx = np.arange(total, dtype=np.int64)
        else:
            m = rng.binomial(total, p)
            idx = np.sort(rng.choice(total, size=m, replace=False))
        src, dst = _triu_from_linear(idx, n)
    elif kind == "configuration-power-law":
        a = float(param)
        if not 2.0 < a <= 3.5:
            raise GraphError("power-law exponent must lie in (2, 3.5]")
        deg = power_law_degrees(n, a, rng, d_min=d_min)
        if deg.sum() % 2:
            deg[rng.integers(n)] += 1
        stubs = np.repeat(np.arange(n, dtype=np.int64), deg)
        rng.shuffle(stubs)
        src, dst = stubs[0::2], stubs[1::2]
    else:
        raise GraphError(f"unknown graph kind {kind!r}")
    g = Graph.from_edges(n, src, dst, directed=False)
    lcc = largest_connected_component(g)
    g.load_report["lcc_fraction"] = lcc.node_count / n
    return g


def _triu_from_linear(idx: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    # row i holds pairs (i, j>i); row start offset s(i) = i*n - i*(i+1)/2
    i = (n - 2 - np.floor(np.sqrt(-8.0 * idx + 4.0 * n * (n - 1) - 7) / 2.0 - 0.5)).astype(np.int64)
    j = idx + i + 1 - n * (n - 1) // 2 + (n - i) * (n - i - 1) // 2
    return i, j


def generate_directed_power_law(n: int, mean_out_degree: float, seed: int, out_exponent: float = 2.4,
                                in_exponent: float = 2.0, reciprocity: float = 0.3,
                                max_out_weight: int | None = None, max_in_weight: int | None = None) -> Graph:
    """Seeded directed heavy-tailed graph (Chung-Lu style edge placement).

    Edge sources are drawn proportionally to power-law out-weights and
    targets to independent power-law in-weights; each edge is reciprocated
    with probability ``reciprocity``.  Used as a desk-scale stand-in for
    directed social graphs.
    """
    if n < 3:
        raise GraphError("n must be >= 3")
    rng = np.random.default_rng(seed)
    w_out = power_law_degrees(n, out_exponent, rng, d_min=1, d_max=max_out_weight or n // 10 + 1).astype(float)
    w_in = power_law_degrees(n, in_exponent, rng, d_min=1, d_max=max_in_weight or n // 10 + 1).astype(float)
    m = int(round(n * mean_out_degree))
    src = rng.choice(n, size=m, p=w_out / w_out.sum())
    dst = rng.choice(n, size=m, p=w_in / w_in.sum())
    back = rng.random(m) < reciprocity
    src, dst = np.concatenate([src, dst[back]]), np.concatenate([dst, src[back]])
    return Graph.from_edges(n, src, dst, directed=True)


# -- labels -----------------------------------------------------------------

@dataclass(frozen=True)
class LabelTable:
    """Dense node labels: ``node_labels[v]`` is a label id in ``0..K-1``.

    ``label_names[k]`` is the label value (a string, or a number for
    ordered labels such as degrees).
    """

    node_labels: np.ndarray
    label_names: tuple

    def __post_init__(self):
        labels = np.asarray(self.node_labels, dtype=np.int64)
        object.__setattr__(self, "node_labels", labels)
        object.__setattr__(self, "label_names", tuple(self.label_names))
        if labels.size and (labels.min() < 0 or labels.max() >= len(self.label_names)):
            raise GraphError("label ids must be dense 0..K-1")
        labels.flags.writeable = False

    @property
    def K(self) -> int:
        return len(self.label_names)

    def __len__(self):
        return self.node_labels.size

    def index(self, name) -> int:
        try:
            return self._lookup[name]
        except KeyError:
            raise KeyError(f"unknown label {name!r}") from None

    @property
    def _lookup(self) -> dict:
        cache = self.__dict__.get("_lookup_cache")
        if cache is None:
            cache = {name: k for k, name in enumerate(self.label_names)}
            object.__setattr__(self, "_lookup_cache", cache)
        return cache

    @property
    def numeric(self) -> bool:
        return all(isinstance(x, (int, float, np.integer, np.floating)) for x in self.label_names)

    @classmethod
    def from_values(cls, values: Sequence[Hashable]) -> "LabelTable":
        """Labels from per-node values; label ids follow sorted value order."""
        arr = np.asarray(values)
        names, inv = np.unique(arr, return_inverse=True)
        return cls(inv.astype(np.int64), tuple(x.item() if hasattr(x, "item") else x for x in names))

    @classmethod
    def space(cls, names: Iterable) -> "LabelTable":
        """A label space with no node assignments (for replayed streams)."""
        return cls(np.zeros(0, dtype=np.int64), tuple(names))


def degree_labels(g: Graph, kind: str = "degree") -> LabelTable:
    """Label every node by its degree (``degree``, ``in`` or ``out``)."""
    arr = {"degree": g.degree, "in": g.in_degree, "out": g.out_degree}[kind]
    return LabelTable.from_values(arr)


def load_labels(path, g: Graph) -> LabelTable:
    """Read ``node_id label`` lines keyed by original node id.

    Every node of ``g`` must receive exactly one label; ids absent from
    ``g`` (e.g. outside the LCC) are ignored.
    """
    pos = {int(o): d for d, o in enumerate(g.original_ids.tolist())}
    assigned: dict[int, str] = {}
    with _open_text(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split(None, 1)
            if len(parts) != 2 or not parts[0].isdigit():
                raise GraphError(f"{path}:{lineno}: expected 'node_id label'")
            d = pos.get(int(parts[0]))
            if d is None:
                continue
            if d in assigned and assigned[d] != parts[1]:
                raise GraphError(f"{path}:{lineno}: node {parts[0]} labelled twice")
            assigned[d] = parts[1]
    missing = g.node_count - len(assigned)
    if missing:
        raise GraphError(f"{path}: {missing} nodes have no label")
    return LabelTable.from_values([assigned[v] for v in range(g.node_count)])


def random_labels(n: int, names: Sequence, probs: Sequence[float], seed: int) -> LabelTable:
    """Independently assigned categorical labels (e.g. M/F/U genders)."""
    rng = np.random.default_rng(seed)
    ids = rng.choice(len(names), size=n, p=np.asarray(probs) / np.sum(probs))
    return LabelTable(ids, tuple(names))


# -- edge labels ------------------------------------------------------------

NodeAttrs = Mapping[str, np.ndarray]


@dataclass(frozen=True)
class EdgeLabeler:
    """Edge label function L'(u, v) evaluated on arrays of endpoints.

    ``requires`` lists the endpoint attributes the labeler reads
    (``degree``, ``label``); estimators check these against what a node
    query reveals about neighbors.

    Modes:
      * ``degree-pair``: ``(min(d_u, d_v), max(d_u, d_v))`` on the
        undirected view (joint degree distribution).
      * ``label-pair`` (alias ``gender-pair``): ``(L(u), L(v))``, sorted when
        ``symmetric`` is true.
      * ``explicit-table``: looks up ``table[(u, v)]``.
      * ``custom``: ``func(u, v, u_attrs, v_attrs) -> sequence of labels``.
    """

    mode: str
    symmetric: bool = True
    label_names: tuple = ()
    table: Mapping | None = None
    func: Callable | None = None
    requires: frozenset = field(default=frozenset())

    @classmethod
    def degree_pair(cls) -> "EdgeLabeler":
        return cls("degree-pair", True, requires=frozenset({"degree"}))

    @classmethod
    def label_pair(cls, labels: LabelTable, symmetric: bool) -> "EdgeLabeler":
        return cls("label-pair", symmetric, label_names=labels.label_names,
                   requires=frozenset({"label"}))

    gender_pair = label_pair

    @classmethod
    def explicit(cls, table: Mapping[tuple[int, int], Hashable], symmetric: bool = True) -> "EdgeLabeler":
        return cls("explicit-table", symmetric, table=dict(table))

    @classmethod
    def custom(cls, func: Callable, requires: Iterable[str] = (), symmetric: bool = True) -> "EdgeLabeler":
        return cls("custom", symmetric, func=func, requires=frozenset(requires))

    def labels(self, u, v, u_attrs: NodeAttrs, v_attrs: NodeAttrs) -> list:
        """Hashable labels for each (u[i], v[i]) pair."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        if self.mode == "degree-pair":
            du, dv = np.asarray(u_attrs["degree"]), np.asarray(v_attrs["degree"])
            lo, hi = np.minimum(du, dv), np.maximum(du, dv)
            return list(zip(lo.tolist(), hi.tolist()))
        if self.mode in ("label-pair", "gender-pair"):
            lu, lv = np.asarray(u_attrs["label"]), np.asarray(v_attrs["label"])
            if self.symmetric:
                lu, lv = np.minimum(lu, lv), np.maximum(lu, lv)
            names = self.label_names
            return [(names[a], names[b]) for a, b in zip(lu.tolist(), lv.tolist())]
        if self.mode == "explicit-table":
            out = []
            for a, b in zip(u.tolist(), v.tolist()):
                key = (a, b)
                if key not in self.table and self.symmetric:
                    key = (b, a)
                out.append(self.table[key])
            return out
        if self.mode == "custom":
            return list(self.func(u, v, u_attrs, v_attrs))
        raise GraphError(f"unknown edge labeler mode {self.mode!r}")
