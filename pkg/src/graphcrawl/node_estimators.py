"""Node label density estimators.

All estimators reweight each sampled node ``s`` by ``1 / pi_hat(s)``, its
non-normalized stationary weight, and normalize by the total weight, so
neither |V| nor |E| needs to be known.  The neighbor-based estimators
additionally spread each sample's weight over its neighbors, which is where
the free neighborhood information in a query reply pays off.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .access import require
from .graph import LabelTable
from .sampling import SampleStream

logger = logging.getLogger(__name__)

SIMPLE = "simple"
NEIGHBOR = "neighbor"
MIXTURE = "mixture"
DIRECTED_NEIGHBOR = "directed-neighbor"
OUT_NEIGHBOR = "out-neighbor"


class EstimatorError(ValueError):
    pass


@dataclass
class DensityEstimate:
    """Label masses indexed by label id; ``values`` sums to one."""

    values: np.ndarray
    label_names: tuple
    estimator_id: str
    n_used: int
    normalizer: float
    raw: np.ndarray | None = None

    def __getitem__(self, name):
        return float(self.values[self.label_names.index(name)])

    def as_dict(self) -> dict:
        return {name: float(x) for name, x in zip(self.label_names, self.values)}

    def csv_rows(self):
        for name, x in zip(self.label_names, self.values.tolist()):
            yield {"label": name, "mass": repr(x), "estimator": self.estimator_id, "n_used": self.n_used}


@dataclass
class MixtureWeights:
    alpha: np.ndarray
    subset_count: int
    var_simple: np.ndarray
    var_neighbor: np.ndarray
    subset_simple: np.ndarray = field(repr=False, default=None)
    subset_neighbor: np.ndarray = field(repr=False, default=None)


def _finish(mass: np.ndarray, labels: LabelTable, estimator_id: str, n: int) -> DensityEstimate:
    total = float(mass.sum())
    if not total > 0:
        raise EstimatorError(f"{estimator_id}: zero total weight")
    return DensityEstimate(mass / total, labels.label_names, estimator_id, n, total)


def _nonempty(stream: SampleStream) -> None:
    if len(stream) == 0:
        raise EstimatorError("empty sample stream")


def _weights(stream, labels):
    batch = stream.replies(labels)
    pi = stream.pi_hat(batch)
    return batch, batch.mult / pi


def estimate_simple(stream: SampleStream, labels: LabelTable) -> DensityEstimate:
    """Reweighted label frequencies of the sampled nodes themselves."""
    _nonempty(stream)
    batch, w = _weights(stream, labels)
    mass = np.bincount(batch.label, weights=w, minlength=labels.K)
    return _finish(mass, labels, SIMPLE, len(stream))


def estimate_neighbor(stream: SampleStream, labels: LabelTable) -> DensityEstimate:
    """Every neighbor ``w`` of a sample contributes ``1 / (pi_hat(s) d_w)``.

    Needs the degrees and labels of the sampled nodes' neighbors.
    """
    _nonempty(stream)
    require(stream.visibility, "nbr_degree", "nbr_label", what="neighbor estimator")
    batch, w = _weights(stream, labels)
    d = batch.nbr_degree
    assert d.size == 0 or d.min() > 0, "a neighbor cannot have degree 0"
    mass = np.bincount(batch.nbr_label, weights=w[batch.row] / d, minlength=labels.K)
    return _finish(mass, labels, NEIGHBOR, len(stream))


def psi(batch) -> np.ndarray:
    """Reciprocity multiplicity of each neighbor entry: 2 for u<->w, else 1."""
    return batch.nbr_out.astype(np.int64) + batch.nbr_in.astype(np.int64)


def estimate_directed_neighbor(stream: SampleStream, labels: LabelTable) -> DensityEstimate:
    """Directed-graph neighbor estimator, weighting neighbor ``w`` by
    ``psi(s, w) / (pi_hat(s) (d_w^(I) + d_w^(O)))``."""
    _nonempty(stream)
    if not stream.directed:
        raise EstimatorError("directed neighbor estimator needs a directed graph; "
                             "use estimate_neighbor")
    require(stream.visibility, "nbr_degree", "nbr_label", what="directed neighbor estimator")
    batch, w = _weights(stream, labels)
    tot = batch.nbr_in_degree + batch.nbr_out_degree
    mass = np.bincount(batch.nbr_label, weights=psi(batch) * w[batch.row] / tot, minlength=labels.K)
    return _finish(mass, labels, DIRECTED_NEIGHBOR, len(stream))


def estimate_out_neighbor(stream: SampleStream, labels: LabelTable, gamma: float = 1.0) -> DensityEstimate:
    """Estimator using only a sample's own in-degree and its out-neighbors'
    in-degrees and labels; ``gamma > 0`` weights the sample itself."""
    _nonempty(stream)
    if not gamma > 0:
        raise EstimatorError("gamma must be > 0")
    require(stream.visibility, "out_nbr_indeg", "out_nbr_label", what="out-neighbor estimator")
    batch, w = _weights(stream, labels)
    own = gamma * w / (batch.in_degree + gamma)
    mass = np.bincount(batch.label, weights=own, minlength=labels.K)
    row, indeg, lab = batch.out_entries()
    mass += np.bincount(lab, weights=w[row] / (indeg + gamma), minlength=labels.K)
    return _finish(mass, labels, OUT_NEIGHBOR, len(stream))


_NEIGHBOR_ESTIMATORS = {
    "undirected": estimate_neighbor,
    "directed": estimate_directed_neighbor,
    "out": estimate_out_neighbor,
}


def estimate_mixture(stream: SampleStream, labels: LabelTable, subset_count: int = 100,
                     neighbor: str = "undirected", gamma: float = 1.0
                     ) -> tuple[DensityEstimate, MixtureWeights]:
    """Per-label blend ``alpha_k * simple + (1 - alpha_k) * neighbor``.

    ``alpha_k = Var(neighbor_k) / (Var(simple_k) + Var(neighbor_k))`` with the
    variances taken across ``subset_count`` equal consecutive slices of the
    stream (the tail remainder is dropped); a zero-variance tie gives 1/2.
    The blend is renormalized; ``raw`` keeps the unnormalized blend.
    """
    _nonempty(stream)
    nb = _NEIGHBOR_ESTIMATORS[neighbor]
    kw = {"gamma": gamma} if neighbor == "out" else {}
    n = len(stream)
    if n < 2 * subset_count:
        fallback = max(2, n // 20)
        warnings.warn(f"stream of {n} samples too short for {subset_count} subsets, using {fallback}",
                      stacklevel=2)
        subset_count = fallback
    if n < subset_count:
        raise EstimatorError(f"need at least {subset_count} samples for the mixture")
    size = n // subset_count
    a_parts, b_parts = [], []
    for i in range(subset_count):
        seg = stream.segment(i * size, (i + 1) * size)
        a_parts.append(estimate_simple(seg, labels).values)
        b_parts.append(nb(seg, labels, **kw).values)
    a_parts, b_parts = np.array(a_parts), np.array(b_parts)
    va = a_parts.var(axis=0, ddof=1)
    vb = b_parts.var(axis=0, ddof=1)
    denom = va + vb
    alpha = np.where(denom > 0, vb / np.where(denom > 0, denom, 1.0), 0.5)

    simple = estimate_simple(stream, labels).values
    neigh = nb(stream, labels, **kw).values
    raw = alpha * simple + (1 - alpha) * neigh
    est = _finish(raw, labels, MIXTURE, n)
    est.raw = raw
    return est, MixtureWeights(alpha, subset_count, va, vb, a_parts, b_parts)


@dataclass
class CCDF:
    """``values[i]`` is the mass strictly above ``degrees[i]``."""

    degrees: np.ndarray
    values: np.ndarray
    estimator_id: str = ""

    def as_dict(self) -> dict:
        return dict(zip(self.degrees.tolist(), self.values.tolist()))


def to_ccdf(d: DensityEstimate) -> CCDF:
    """Complementary CDF over numeric (degree) labels."""
    try:
        keys = np.array([float(x) for x in d.label_names])
    except (TypeError, ValueError):
        raise EstimatorError("CCDF needs numeric labels") from None
    order = np.argsort(keys, kind="stable")
    theta = d.values[order]
    tail = np.cumsum(theta[::-1])[::-1]
    xi = np.concatenate([tail[1:], [0.0]])
    xi = np.maximum(xi, 0.0)
    keys = keys[order]
    if np.all(keys == np.round(keys)):
        keys = keys.astype(np.int64)
    return CCDF(keys, xi, d.estimator_id)


ESTIMATORS = {
    SIMPLE: estimate_simple,
    NEIGHBOR: estimate_neighbor,
    DIRECTED_NEIGHBOR: estimate_directed_neighbor,
    OUT_NEIGHBOR: estimate_out_neighbor,
}


def estimate_node(name: str, stream: SampleStream, labels: LabelTable, **params) -> DensityEstimate:
    """Dispatch by estimator name (``simple``, ``neighbor``, ``mixture``, ...)."""
    if name == MIXTURE:
        keep = {k: params[k] for k in ("subset_count", "neighbor", "gamma") if k in params}
        return estimate_mixture(stream, labels, **keep)[0]
    if name == OUT_NEIGHBOR:
        return estimate_out_neighbor(stream, labels, gamma=params.get("gamma", 1.0))
    try:
        fn = ESTIMATORS[name]
    except KeyError:
        raise EstimatorError(f"unknown node estimator {name!r}") from None
    return fn(stream, labels)


def requirements(name: str, neighbor: str = "undirected") -> tuple[str, ...]:
    """Reply capabilities an estimator needs (for up-front config checks)."""
    if name == SIMPLE:
        return ()
    if name == OUT_NEIGHBOR or (name == MIXTURE and neighbor == "out"):
        return ("out_nbr_indeg", "out_nbr_label")
    return ("nbr_degree", "nbr_label")
