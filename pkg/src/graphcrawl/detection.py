"""Top-N high degree node detection under a crawl budget.

All graph reads go through :class:`~graphcrawl.access.Crawler`, so a
result only ranks nodes whose degree was revealed by a paid-for query:
sampled nodes themselves, or their neighbors when neighbor degrees are
visible.

Budget convention: the seed query is always charged, and ``budget`` counts
the crawls after it, so every method here spends at most ``budget + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .access import BudgetExhausted, CostLedger, Crawler, Visibility, require
from .graph import Graph, GraphError
from .sampling import SampleStream, random_walk, weighted_random_walk

SAMPLED_ONLY = "sampled-only"
SAMPLED_PLUS_NEIGHBORHOOD = "sampled-plus-neighborhood"


@dataclass
class DetectionResult:
    top: list[tuple[int, int]]
    candidate_pool: str
    ledger_snapshot: dict
    found_by: str = ""
    sampled: list[int] = field(default_factory=list)

    @property
    def nodes(self) -> list[int]:
        return [v for v, _ in self.top]

    def recall(self, truth) -> float:
        truth = set(int(x) for x in truth)
        return len(truth.intersection(self.nodes)) / max(len(truth), 1)

    def csv_rows(self):
        for rank, (v, d) in enumerate(self.top, 1):
            yield {"rank": rank, "node_id": v, "degree": d, "found_by": self.found_by}


def _score_of(reply, kind: str, j: int | None = None) -> int:
    """Degree of the reply's node (``j is None``) or of its ``j``-th neighbor."""
    if j is None:
        return {"degree": reply.degree, "in": reply.in_degree, "out": reply.out_degree,
                "total": reply.in_degree + reply.out_degree}[kind]
    if kind == "degree":
        return int(reply.nbr_degree[j])
    if kind == "in":
        return int(reply.nbr_in_degree[j])
    if kind == "out":
        return int(reply.nbr_out_degree[j])
    return int(reply.nbr_in_degree[j] + reply.nbr_out_degree[j])


def top_n(scores: dict[int, int], N: int) -> list[tuple[int, int]]:
    """Highest scores first, ties by ascending node id."""
    if not scores:
        return []
    ids = np.fromiter(scores.keys(), dtype=np.int64, count=len(scores))
    sc = np.fromiter(scores.values(), dtype=np.int64, count=len(scores))
    order = np.lexsort((ids, -sc))[:N]
    return list(zip(ids[order].tolist(), sc[order].tolist()))


def exact_top_n(g: Graph, N: int, kind: str = "degree") -> np.ndarray:
    deg = {"degree": g.degree, "in": g.in_degree, "out": g.out_degree,
           "total": g.in_degree + g.out_degree}[kind]
    order = np.lexsort((np.arange(g.node_count), -deg))
    return order[:N]


def _nbr_scores(rep, kind: str) -> np.ndarray:
    if kind == "degree":
        return rep.nbr_degree
    if kind == "in":
        return rep.nbr_in_degree
    if kind == "out":
        return rep.nbr_out_degree
    return rep.nbr_in_degree + rep.nbr_out_degree


def pool_scores(replies, pool: str, kind: str = "degree") -> dict[int, int]:
    """Known degree of every pool member, read from the replies only."""
    ids, sc = [], []
    if pool == SAMPLED_PLUS_NEIGHBORHOOD:
        for rep in replies:
            ids.append(rep.neighbors)
            sc.append(np.asarray(_nbr_scores(rep, kind), dtype=np.int64))
    ids.append(np.array([rep.node for rep in replies], dtype=np.int64))
    sc.append(np.array([_score_of(rep, kind) for rep in replies], dtype=np.int64))
    ids, sc = np.concatenate(ids), np.concatenate(sc)
    return dict(zip(ids.tolist(), sc.tolist()))


def detect_from_stream(stream: SampleStream, N: int, pool: str = SAMPLED_ONLY, kind: str = "degree",
                       ledger: CostLedger | None = None) -> DetectionResult:
    """Top ``N`` of the sampled nodes (optionally plus their neighbors)."""
    if len(stream) == 0:
        raise GraphError("empty sample stream")
    if pool == SAMPLED_PLUS_NEIGHBORHOOD:
        require(stream.visibility, "nbr_degree", what="neighborhood candidate pool")
    batch = stream.replies()
    reps = [batch.reply(r) for r in range(len(batch))]
    scores = pool_scores(reps, pool, kind)
    return DetectionResult(top_n(scores, N), pool, ledger.snapshot() if ledger else {},
                           found_by=stream.method, sampled=batch.nodes.tolist())


def _crawler(g, visibility, ledger):
    return Crawler(g, visibility, ledger if ledger is not None else CostLedger())


def _check_seed(g: Graph, seed_node: int) -> None:
    if g.degree[seed_node] == 0:
        raise GraphError(f"seed node {seed_node} is isolated")


def mxs_detect(g: Graph, seed_node: int, budget: int, N: int, directed_scores: bool = False,
               ledger: CostLedger | None = None, visibility=Visibility.NBR_DEGREES,
               kind: str | None = None, return_crawler: bool = False) -> DetectionResult:
    """Modified expansion sampling.

    Repeatedly adds to S the frontier node with the most neighbors outside
    S, ``d_u - d_u^(S)``, which is known from the neighbor degrees in the
    replies of S without crawling the frontier.  Only added nodes are
    charged.  Scores live in a dense array filled from replies only; the
    argmax picks the same node a (score, -id) max-heap would.  With ``directed_scores`` the degree is ``d^(I) + d^(O)`` and
    links to S count with their reciprocity multiplicity.
    """
    vis = Visibility.parse(visibility)
    require(vis, "nbr_degree", what="MXS")
    _check_seed(g, seed_node)
    if budget < 0:
        raise ValueError("budget must be >= 0")
    crawler = _crawler(g, vis, ledger)
    kind = kind or ("total" if directed_scores else "degree")

    n = g.node_count
    in_s = np.zeros(n, dtype=bool)
    links = np.zeros(n, dtype=np.int64)      # d_u^(S)
    full = np.zeros(n, dtype=np.int64)       # d_u, or d^(I) + d^(O)
    score = np.full(n, -1, dtype=np.int64)   # -1 marks nodes outside N(S)
    sampled: list[int] = []

    def add(v: int):
        rep = crawler.query(v)
        in_s[v] = True
        score[v] = -1
        sampled.append(v)
        nb = rep.neighbors
        keep = ~in_s[nb]
        nb = nb[keep]
        if directed_scores:
            full[nb] = (rep.nbr_in_degree + rep.nbr_out_degree)[keep]
            links[nb] += (rep.nbr_out.astype(np.int64) + rep.nbr_in.astype(np.int64))[keep]
        else:
            full[nb] = rep.nbr_degree[keep]
            links[nb] += 1
        score[nb] = full[nb] - links[nb]

    add(int(seed_node))
    for _ in range(budget):
        # argmax returns the first maximum, i.e. the smallest id among ties
        best = int(np.argmax(score))
        if score[best] < 0:
            break
        try:
            add(best)
        except BudgetExhausted:
            break
    reps = [crawler.peek(v) for v in sampled]
    scores = pool_scores(reps, SAMPLED_PLUS_NEIGHBORHOOD, kind)
    res = DetectionResult(top_n(scores, N), SAMPLED_PLUS_NEIGHBORHOOD, crawler.ledger.snapshot(),
                          found_by="MXS", sampled=sampled)
    return (res, crawler) if return_crawler else res


def xs_detect(g: Graph, seed_node: int, budget: int, N: int, ledger: CostLedger | None = None,
              free_frontier: bool = False, visibility=Visibility.SELF_ONLY,
              kind: str = "degree") -> DetectionResult:
    """Expansion sampling.

    Adds the frontier node with the most neighbors outside ``S ∪ N(S)``,
    ``d_u - d_u^(S) - d_u^(N(S))``.  That count needs each frontier node's
    neighbor list, so every frontier node is crawled and charged (unless
    ``free_frontier``, which models free neighbor-of-neighbor lookups).
    Stops when the budget runs out; ranks ``S ∪ N(S)`` by known degree.
    """
    _check_seed(g, seed_node)
    crawler = _crawler(g, visibility, ledger)
    free = Crawler(g, crawler.visibility)    # uncharged lookups for free_frontier
    limit = crawler.ledger.spent + budget + 1
    n = g.node_count
    covered = np.zeros(n, dtype=bool)        # S ∪ N(S)
    cnt = np.zeros(n, dtype=np.int64)        # d_u^(S) + d_u^(N(S))
    deg = np.full(n, -1, dtype=np.int64)     # d_u once u was looked up
    score = np.full(n, -1, dtype=np.int64)   # -1 marks nodes outside N(S)
    in_s = np.zeros(n, dtype=bool)
    known: dict[int, object] = {}
    sampled: list[int] = []

    def paid(w, neighbor):
        if crawler.peek(w) is None and crawler.ledger.spent + 1 > limit:
            raise BudgetExhausted("XS budget spent")
        return crawler.query(w, neighbor=neighbor)

    def look(w):
        return free.query(w) if free_frontier else paid(w, True)

    def cover(y, rep):
        covered[y] = True
        known[y] = rep
        deg[y] = rep.degree
        cnt[rep.neighbors] += 1

    def add(v):
        in_s[v] = True
        sampled.append(v)
        for w in known[v].neighbors.tolist():
            if not covered[w]:
                cover(w, look(w))
        front = covered & ~in_s
        score[:] = np.where(front, deg - cnt, -1)

    try:
        s0 = int(seed_node)
        cover(s0, paid(s0, False))
        add(s0)
        additions = 0
        while not free_frontier or additions < budget:
            best = int(np.argmax(score))
            if score[best] < 0:
                break
            if free_frontier:
                if crawler.ledger.spent + 1 > limit:
                    break
                crawler.ledger.charge_crawl(1)
            add(best)
            additions += 1
    except BudgetExhausted:
        pass
    scores: dict[int, int] = {}
    for v in sampled:
        scores[v] = _score_of(known[v], kind)
        for w in known[v].neighbors.tolist():
            if w not in scores and w in known:
                scores[w] = _score_of(known[w], kind)
    # neighbors of S whose degree was never revealed cannot be ranked
    return DetectionResult(top_n(scores, N), SAMPLED_PLUS_NEIGHBORHOOD, crawler.ledger.snapshot(),
                           found_by="XS" + ("-free" if free_frontier else ""), sampled=sampled)


def rw_detect(g: Graph, seed_node: int, budget: int, N: int, pool: str = SAMPLED_PLUS_NEIGHBORHOOD,
              ledger: CostLedger | None = None, seed: int | None = None,
              visibility=Visibility.NBR_DEGREES, kind: str = "degree") -> DetectionResult:
    """RW of ``budget`` steps from ``seed_node`` (seed query charged too)."""
    return wrw_detect(g, seed_node, budget, N, beta=None, pool=pool, ledger=ledger, seed=seed,
                      visibility=visibility, kind=kind)


def wrw_detect(g: Graph, seed_node: int, budget: int, N: int, beta: float | None = 0.5,
               directed_weights: bool = False, pool: str | None = None, ledger: CostLedger | None = None,
               seed: int | None = None, visibility=Visibility.NBR_DEGREES,
               kind: str = "degree") -> DetectionResult:
    """Weighted RW for ``budget`` steps, then rank the candidate pool.

    The pool includes the sampled nodes' neighbors when neighbor degrees
    are visible.  ``beta=None`` (or 0) runs a plain RW.
    """
    vis = Visibility.parse(visibility)
    _check_seed(g, seed_node)
    ledger = ledger if ledger is not None else CostLedger()
    ledger.charge_crawl(1)  # seed query
    if pool is None:
        pool = SAMPLED_PLUS_NEIGHBORHOOD if vis.grants("nbr_degree") else SAMPLED_ONLY
    if beta is None or beta == 0:
        stream = random_walk(g, seed_node, budget, ledger=ledger, seed=seed, visibility=vis)
        name = "RW"
    else:
        stream = weighted_random_walk(g, seed_node, budget, beta=beta, directed_weights=directed_weights,
                                      ledger=ledger, seed=seed, visibility=vis)
        name = f"WRW(beta={beta:g})"
    nodes = np.concatenate([[seed_node], stream.nodes]).astype(np.int64)
    full = SampleStream(nodes, stream.method, stream.pi_hat_rule, vis, g, seed=stream.seed)
    res = detect_from_stream(full, N, pool=pool, kind=kind, ledger=ledger)
    res.found_by = name + ("" if pool == SAMPLED_PLUS_NEIGHBORHOOD else " sampled-only")
    return res
