"""What a node query reveals, and what it costs.

A query on node ``v`` always returns ``v``'s own label, degrees and its
neighbor ids (with the direction of each of its own edges).  Anything
about the *neighbors* themselves is gated by a :class:`Visibility` level;
reading an ungranted field raises :class:`CapabilityError` instead of
returning zeros.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph, LabelTable


class CapabilityError(RuntimeError):
    """An operation needs reply fields the visibility level does not grant."""


class BudgetExhausted(RuntimeError):
    pass


class Visibility(enum.Enum):
    SELF_ONLY = "self-only"
    NBR_DEGREES = "nbr-degrees"
    NBR_DEGREES_LABELS = "nbr-degrees-labels"
    OUT_NBR_WITH_INDEG = "out-nbr-with-indeg"

    @classmethod
    def parse(cls, text: "str | Visibility") -> "Visibility":
        if isinstance(text, Visibility):
            return text
        key = str(text).strip().lower().replace("_", "-")
        for v in cls:
            if v.value == key or v.name.lower().replace("_", "-") == key:
                return v
        raise ValueError(f"unknown visibility {text!r}")

    @property
    def capabilities(self) -> frozenset:
        return _CAPS[self]

    def grants(self, cap: str) -> bool:
        return cap in _CAPS[self]


# nbr_degree: d_w, d_w^(I), d_w^(O) for every neighbor w
# nbr_label: L(w) for every neighbor w
# out_nbr_indeg / out_nbr_label: d_w^(I) and L(w) for out-neighbors only
_CAPS = {
    Visibility.SELF_ONLY: frozenset(),
    Visibility.NBR_DEGREES: frozenset({"nbr_degree", "out_nbr_indeg"}),
    Visibility.NBR_DEGREES_LABELS: frozenset({"nbr_degree", "nbr_label", "out_nbr_indeg", "out_nbr_label"}),
    Visibility.OUT_NBR_WITH_INDEG: frozenset({"out_nbr_indeg", "out_nbr_label"}),
}

_CAP_TEXT = {
    "nbr_degree": "neighbor degrees",
    "nbr_label": "neighbor labels",
    "out_nbr_indeg": "out-neighbor in-degrees",
    "out_nbr_label": "out-neighbor labels",
}


def require(visibility: Visibility, *caps: str, what: str = "operation") -> None:
    missing = [c for c in caps if not visibility.grants(c)]
    if missing:
        raise CapabilityError(
            f"{what} requires {' and '.join(_CAP_TEXT[c] for c in missing)}, "
            f"not granted at visibility {visibility.value}")


def _gated(name, cap):
    def get(self):
        value = getattr(self, "_" + name)
        if value is None or not self.visibility.grants(cap):
            raise CapabilityError(f"{name} requires {_CAP_TEXT[cap]} "
                                  f"(visibility {self.visibility.value})")
        return value
    get.__name__ = name
    return property(get)


@dataclass(frozen=True, eq=False)
class NodeReply:
    """The reply to one node query.

    ``neighbors`` are undirected neighbor ids; ``nbr_out[i]`` / ``nbr_in[i]``
    say whether ``node -> neighbors[i]`` / ``neighbors[i] -> node`` is a
    directed edge.  Neighbor attributes are ``None`` when not granted and
    raise on access.
    """

    node: int
    label: int | None
    degree: int
    in_degree: int
    out_degree: int
    neighbors: np.ndarray
    nbr_out: np.ndarray
    nbr_in: np.ndarray
    visibility: Visibility
    _nbr_degree: np.ndarray | None = None
    _nbr_in_degree: np.ndarray | None = None
    _nbr_out_degree: np.ndarray | None = None
    _nbr_label: np.ndarray | None = None

    nbr_degree = _gated("nbr_degree", "nbr_degree")
    nbr_in_degree = _gated("nbr_in_degree", "nbr_degree")
    nbr_out_degree = _gated("nbr_out_degree", "nbr_degree")
    nbr_label = _gated("nbr_label", "nbr_label")

    @property
    def out_neighbors(self) -> np.ndarray:
        return self.neighbors[self.nbr_out]

    @property
    def in_neighbors(self) -> np.ndarray:
        return self.neighbors[self.nbr_in]


class ReplyBatch:
    """Columnar replies for a set of distinct sampled nodes.

    Row ``r`` describes ``nodes[r]``; ``mult[r]`` is how many times that node
    occurs in the stream.  Neighbor entries are flattened CSR-style:
    entries ``indptr[r]:indptr[r+1]`` belong to row ``r`` and ``row`` maps
    each entry back to its row.
    """

    def __init__(self, nodes, mult, label, degree, in_degree, out_degree, indptr, nbr, nbr_out,
                 nbr_in, visibility, directed, nbr_degree=None, nbr_in_degree=None,
                 nbr_out_degree=None, nbr_label=None):
        self.nodes = nodes
        self.mult = mult
        self.label = label
        self.degree = degree
        self.in_degree = in_degree
        self.out_degree = out_degree
        self.indptr = indptr
        self.nbr = nbr
        self.nbr_out = nbr_out
        self.nbr_in = nbr_in
        self.visibility = visibility
        self.directed = directed
        self.row = np.repeat(np.arange(nodes.size), np.diff(indptr))
        self._nbr_degree = nbr_degree
        self._nbr_in_degree = nbr_in_degree
        self._nbr_out_degree = nbr_out_degree
        self._nbr_label = nbr_label

    def __len__(self):
        return self.nodes.size

    def _get(self, name, cap):
        value = getattr(self, "_" + name)
        if value is None or not self.visibility.grants(cap):
            raise CapabilityError(f"{name} requires {_CAP_TEXT[cap]} "
                                  f"(visibility {self.visibility.value})")
        return value

    @property
    def nbr_degree(self):
        return self._get("nbr_degree", "nbr_degree")

    @property
    def nbr_in_degree(self):
        return self._get("nbr_in_degree", "nbr_degree")

    @property
    def nbr_out_degree(self):
        return self._get("nbr_out_degree", "nbr_degree")

    @property
    def nbr_label(self):
        return self._get("nbr_label", "nbr_label")

    def out_entries(self):
        """``(row, in_degree, label)`` for out-neighbor entries only."""
        if not self.visibility.grants("out_nbr_indeg"):
            require(self.visibility, "out_nbr_indeg", what="out-neighbor access")
        sel = self.nbr_out
        label = self._nbr_label[sel] if (self._nbr_label is not None
                                         and self.visibility.grants("out_nbr_label")) else None
        return self.row[sel], self._nbr_in_degree[sel], label

    @classmethod
    def from_graph(cls, g: Graph, nodes, mult, visibility: Visibility,
                   labels: LabelTable | None = None) -> "ReplyBatch":
        nodes = np.asarray(nodes, dtype=np.int64)
        deg = g.degree[nodes]
        indptr = np.zeros(nodes.size + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        starts = g.und_indptr[nodes]
        offs = np.repeat(starts - indptr[:-1], deg) + np.arange(indptr[-1])
        nbr = g.und_indices[offs]
        owner = np.repeat(nodes, deg)
        if g.directed:
            nbr_out = g.has_edge(owner, nbr)
            nbr_in = g.has_edge(nbr, owner)
        else:
            nbr_out = np.ones(nbr.size, dtype=bool)
            nbr_in = nbr_out
        caps = visibility.capabilities
        node_label = labels.node_labels if labels is not None else None
        kw = {}
        if "nbr_degree" in caps:
            kw.update(nbr_degree=g.degree[nbr], nbr_in_degree=g.in_degree[nbr],
                      nbr_out_degree=g.out_degree[nbr])
        elif "out_nbr_indeg" in caps:
            # only out-neighbor entries carry a value; the rest are masked
            kw.update(nbr_in_degree=np.where(nbr_out, g.in_degree[nbr], -1))
        if node_label is not None:
            if "nbr_label" in caps:
                kw["nbr_label"] = node_label[nbr]
            elif "out_nbr_label" in caps:
                kw["nbr_label"] = np.where(nbr_out, node_label[nbr], -1)
        return cls(nodes, np.asarray(mult, dtype=np.int64),
                   node_label[nodes] if node_label is not None else None,
                   deg, g.in_degree[nodes], g.out_degree[nodes], indptr, nbr, nbr_out, nbr_in,
                   visibility, g.directed, **kw)

    @classmethod
    def from_replies(cls, replies: list[NodeReply], mult, visibility: Visibility,
                     directed: bool) -> "ReplyBatch":
        def cat(getter, dtype):
            parts = [getter(r) for r in replies]
            return np.concatenate(parts).astype(dtype) if parts else np.zeros(0, dtype)

        def opt(attr, dtype):
            vals = [getattr(r, "_" + attr) for r in replies]
            if any(v is None for v in vals):
                return None
            return np.concatenate(vals).astype(dtype) if vals else np.zeros(0, dtype)

        deg = np.array([r.neighbors.size for r in replies], dtype=np.int64)
        indptr = np.zeros(len(replies) + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        label = np.array([-1 if r.label is None else r.label for r in replies], dtype=np.int64)
        return cls(np.array([r.node for r in replies], dtype=np.int64), np.asarray(mult, dtype=np.int64),
                   label, np.array([r.degree for r in replies], dtype=np.int64),
                   np.array([r.in_degree for r in replies], dtype=np.int64),
                   np.array([r.out_degree for r in replies], dtype=np.int64), indptr,
                   cat(lambda r: r.neighbors, np.int64), cat(lambda r: r.nbr_out, bool),
                   cat(lambda r: r.nbr_in, bool), visibility, directed,
                   nbr_degree=opt("nbr_degree", np.int64), nbr_in_degree=opt("nbr_in_degree", np.int64),
                   nbr_out_degree=opt("nbr_out_degree", np.int64), nbr_label=opt("nbr_label", np.int64))

    def reply(self, r: int) -> NodeReply:
        s = slice(self.indptr[r], self.indptr[r + 1])

        def part(arr):
            return None if arr is None else arr[s]

        return NodeReply(int(self.nodes[r]), None if self.label is None else int(self.label[r]),
                         int(self.degree[r]), int(self.in_degree[r]), int(self.out_degree[r]),
                         self.nbr[s], self.nbr_out[s], self.nbr_in[s], self.visibility,
                         part(self._nbr_degree), part(self._nbr_in_degree),
                         part(self._nbr_out_degree), part(self._nbr_label))


@dataclass
class CostLedger:
    """Query accounting against a budget.

    ``charge_crawl`` costs one unit per crawled node; ``charge_uni`` costs
    ``uni_cost_c`` per delivered uniform sample (deterministic mode) or a
    geometric number of attempts with mean ``c`` (stochastic mode).
    ``budget_B=None`` means unlimited.
    """

    budget_B: float | None = None
    uni_cost_c: float = 1.0
    stochastic_uni: bool = False
    spent_crawl: int = 0
    spent_uni_attempts: float = 0
    spent_neighbor_crawl: int = 0
    exhausted: bool = False

    def __post_init__(self):
        if self.uni_cost_c < 1:
            raise ValueError("uni_cost_c must be >= 1")

    @property
    def spent(self) -> float:
        return self.spent_crawl + self.spent_uni_attempts + self.spent_neighbor_crawl

    @property
    def remaining(self) -> float:
        return math.inf if self.budget_B is None else self.budget_B - self.spent

    def affordable_crawls(self, k: int) -> int:
        if self.budget_B is None:
            return int(k)
        return int(min(k, max(0, math.floor(self.remaining + 1e-9))))

    def charge_crawl(self, k: int = 1, neighbor: bool = False) -> None:
        if k > self.remaining + 1e-9:
            self.exhausted = True
            raise BudgetExhausted(f"crawl of {k} exceeds remaining budget {self.remaining}")
        if neighbor:
            self.spent_neighbor_crawl += k
        else:
            self.spent_crawl += k

    def uni_costs(self, k: int, rng: np.random.Generator) -> np.ndarray:
        """Per-sample attempt counts for ``k`` uniform draws."""
        if self.stochastic_uni:
            return rng.geometric(1.0 / self.uni_cost_c, size=k).astype(float)
        return np.full(k, float(self.uni_cost_c))

    def charge_uni(self, costs: np.ndarray) -> int:
        """Charge as many of ``costs`` as fit; returns how many were delivered."""
        cum = np.cumsum(costs)
        fit = int(np.searchsorted(cum, self.remaining + 1e-9, side="right"))
        if fit < len(costs):
            self.exhausted = True
        self.spent_uni_attempts += float(cum[fit - 1]) if fit else 0.0
        return fit

    def snapshot(self) -> dict:
        return {"budget_B": self.budget_B, "uni_cost_c": self.uni_cost_c,
                "spent_crawl": self.spent_crawl, "spent_uni_attempts": self.spent_uni_attempts,
                "spent_neighbor_crawl": self.spent_neighbor_crawl, "spent": self.spent,
                "exhausted": self.exhausted}


class Crawler:
    """Budgeted query access to a graph at a fixed visibility level.

    Detection and short-path code route every graph read through
    :meth:`query`, so their outputs only use information they paid for.
    """

    def __init__(self, g: Graph, visibility: Visibility = Visibility.NBR_DEGREES,
                 ledger: CostLedger | None = None, labels: LabelTable | None = None,
                 cache: bool = True):
        self.graph = g
        self.visibility = Visibility.parse(visibility)
        self.ledger = ledger if ledger is not None else CostLedger()
        self.labels = labels
        self.cache = cache
        self._seen: dict[int, NodeReply] = {}

    def peek(self, v: int) -> NodeReply | None:
        """A reply already paid for, or ``None``."""
        return self._seen.get(int(v))

    def query(self, v: int, neighbor: bool = False) -> NodeReply:
        v = int(v)
        if self.cache and v in self._seen:
            return self._seen[v]
        self.ledger.charge_crawl(1, neighbor=neighbor)
        rep = ReplyBatch.from_graph(self.graph, np.array([v]), np.array([1]), self.visibility,
                                    self.labels).reply(0)
        self._seen[v] = rep
        return rep
