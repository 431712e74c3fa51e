"""Edge label density estimators.

Traversal estimators count the edges a walk crossed; neighborhood
estimators count every edge incident to a sampled node, weighted by
``1 / pi_hat`` of the sampled endpoint.  Estimates are sparse: only labels
that were observed get an entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .access import CapabilityError, require
from .graph import EdgeLabeler, LabelTable
from .node_estimators import EstimatorError
from .sampling import UNI, SampleStream

TRAVERSAL = "edge-traversal"
TRAVERSAL_DIRECTED = "edge-traversal-directed"
EDGE_NEIGHBOR = "edge-neighbor"
EDGE_NEIGHBOR_DIRECTED = "edge-neighbor-directed"

_NEEDS = {"degree": "nbr_degree", "label": "nbr_label", "in_degree": "nbr_degree",
          "out_degree": "nbr_degree"}


@dataclass
class EdgeDensityEstimate:
    values: dict
    estimator_id: str
    normalizer: float
    n_used: int

    def __getitem__(self, label):
        return self.values.get(label, 0.0)

    def csv_rows(self):
        for label, mass in sorted(self.values.items(), key=lambda kv: str(kv[0])):
            yield {"label": label, "mass": repr(mass), "estimator": self.estimator_id}


def encode(labeler: EdgeLabeler, u, v, ua, va):
    """Integer codes for the edge labels plus a decoder for unique codes."""
    if labeler.mode == "degree-pair":
        du, dv = np.asarray(ua["degree"], np.int64), np.asarray(va["degree"], np.int64)
        lo, hi = np.minimum(du, dv), np.maximum(du, dv)
        base = int(max(hi.max(initial=0), 1)) + 1
        return lo * base + hi, lambda c: (int(c // base), int(c % base))
    if labeler.mode in ("label-pair", "gender-pair"):
        k = max(len(labeler.label_names), 1)
        lu, lv = np.asarray(ua["label"], np.int64), np.asarray(va["label"], np.int64)
        if labeler.symmetric:
            lu, lv = np.minimum(lu, lv), np.maximum(lu, lv)
        names = labeler.label_names
        return lu * k + lv, lambda c: (names[int(c // k)], names[int(c % k)])
    labels = labeler.labels(u, v, ua, va)
    index: dict = {}
    codes = np.fromiter((index.setdefault(x, len(index)) for x in labels), dtype=np.int64, count=len(labels))
    inverse = {i: x for x, i in index.items()}
    return codes, lambda c: inverse[int(c)]


def _aggregate(labeler, u, v, ua, va, weights) -> tuple[dict, float]:
    weights = np.asarray(weights, dtype=float)
    keep = weights != 0
    if not keep.all():
        u, v = np.asarray(u)[keep], np.asarray(v)[keep]
        ua = {k: np.asarray(x)[keep] for k, x in ua.items()}
        va = {k: np.asarray(x)[keep] for k, x in va.items()}
        weights = weights[keep]
    if weights.size == 0:
        return {}, 0.0
    codes, decode = encode(labeler, u, v, ua, va)
    uniq, inv = np.unique(codes, return_inverse=True)
    sums = np.bincount(inv, weights=weights)
    return {decode(c): float(s) for c, s in zip(uniq.tolist(), sums.tolist())}, float(weights.sum())


def _finish(mass: dict, total: float, estimator_id: str, n: int) -> EdgeDensityEstimate:
    if not total > 0:
        raise EstimatorError(f"{estimator_id}: zero total weight")
    return EdgeDensityEstimate({k: x / total for k, x in mass.items()}, estimator_id, total, n)


def _traversal_inputs(stream: SampleStream, labels):
    if stream.method == UNI or stream.edge_u.size == 0:
        raise CapabilityError("traversal estimators need traversed edges (RW/FS/WRW streams)")
    return stream.edge_endpoint_attrs(labels)


def estimate_edge_traversal(stream: SampleStream, labeler: EdgeLabeler,
                            labels: LabelTable | None = None) -> EdgeDensityEstimate:
    """Plain frequency of labels over the traversed edges."""
    ua, va = _traversal_inputs(stream, labels)
    mass, total = _aggregate(labeler, stream.edge_u, stream.edge_v, ua, va, np.ones(stream.edge_u.size))
    return _finish(mass, total, TRAVERSAL, stream.edge_u.size)


def estimate_edge_traversal_directed(stream: SampleStream, labeler: EdgeLabeler,
                                     labels: LabelTable | None = None) -> EdgeDensityEstimate:
    """Each traversed pair contributes the label of every direction present
    in E_d; normalized by the number of such direction-resolved incidences."""
    if not stream.directed:
        raise EstimatorError("directed traversal estimator needs a directed graph")
    ua, va = _traversal_inputs(stream, labels)
    fwd, bwd = stream.edge_directions()
    u, v = stream.edge_u, stream.edge_v
    mass, total = _aggregate(labeler, np.concatenate([u, v]), np.concatenate([v, u]),
                             {k: np.concatenate([ua[k], va[k]]) for k in ua},
                             {k: np.concatenate([va[k], ua[k]]) for k in ua},
                             np.concatenate([fwd, bwd]).astype(float))
    return _finish(mass, total, TRAVERSAL_DIRECTED, u.size)


def _neighbor_inputs(stream: SampleStream, labeler: EdgeLabeler, labels, what):
    if len(stream) == 0:
        raise EstimatorError("empty sample stream")
    caps = sorted({_NEEDS[r] for r in labeler.requires})
    require(stream.visibility, *caps, what=f"{what} with a {labeler.mode} labeler")
    batch = stream.replies(labels)
    w = batch.mult / stream.pi_hat(batch)
    row = batch.row
    own = {"degree": batch.degree[row], "in_degree": batch.in_degree[row],
           "out_degree": batch.out_degree[row]}
    other = {}
    if batch.label is not None:
        own["label"] = batch.label[row]
    for attr in labeler.requires:
        if attr == "label":
            other["label"] = batch.nbr_label
        elif attr == "degree":
            other["degree"] = batch.nbr_degree
        elif attr == "in_degree":
            other["in_degree"] = batch.nbr_in_degree
        elif attr == "out_degree":
            other["out_degree"] = batch.nbr_out_degree
    for attr in labeler.requires:
        if attr not in own:
            raise CapabilityError(f"labeler needs node attribute {attr!r}")
    return batch, w, own, other


def estimate_edge_neighbor(stream: SampleStream, labeler: EdgeLabeler,
                           labels: LabelTable | None = None) -> EdgeDensityEstimate:
    """Every edge incident to a sample ``s`` contributes ``1 / pi_hat(s)``.

    The normalizer is ``sum_i d_{s_i} / pi_hat(s_i)``.  Works for UNI, RW
    and FS streams.
    """
    batch, w, own, other = _neighbor_inputs(stream, labeler, labels, "edge neighbor estimator")
    own = {k: x for k, x in own.items() if k in labeler.requires}
    mass, total = _aggregate(labeler, batch.nodes[batch.row], batch.nbr, own, other, w[batch.row])
    return _finish(mass, total, EDGE_NEIGHBOR, len(stream))


def estimate_edge_neighbor_directed(stream: SampleStream, labeler: EdgeLabeler,
                                    labels: LabelTable | None = None) -> EdgeDensityEstimate:
    """Directed version: an incident pair contributes the label of each
    direction present in E_d, weighted by ``1 / pi_hat(s)``."""
    if not stream.directed:
        raise EstimatorError("directed neighbor estimator needs a directed graph")
    batch, w, own, other = _neighbor_inputs(stream, labeler, labels, "directed edge neighbor estimator")
    own = {k: x for k, x in own.items() if k in labeler.requires}
    s, nb = batch.nodes[batch.row], batch.nbr
    ws = w[batch.row]
    mass, total = _aggregate(labeler, np.concatenate([s, nb]), np.concatenate([nb, s]),
                             {k: np.concatenate([own[k], other[k]]) for k in own},
                             {k: np.concatenate([other[k], own[k]]) for k in own},
                             np.concatenate([ws * batch.nbr_out, ws * batch.nbr_in]))
    return _finish(mass, total, EDGE_NEIGHBOR_DIRECTED, len(stream))


EDGE_ESTIMATORS = {
    TRAVERSAL: estimate_edge_traversal,
    TRAVERSAL_DIRECTED: estimate_edge_traversal_directed,
    EDGE_NEIGHBOR: estimate_edge_neighbor,
    EDGE_NEIGHBOR_DIRECTED: estimate_edge_neighbor_directed,
}


def estimate_edge(name: str, stream: SampleStream, labeler: EdgeLabeler,
                  labels: LabelTable | None = None) -> EdgeDensityEstimate:
    try:
        fn = EDGE_ESTIMATORS[name]
    except KeyError:
        raise EstimatorError(f"unknown edge estimator {name!r}") from None
    return fn(stream, labeler, labels)
