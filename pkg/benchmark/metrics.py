from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Any, Iterable

import numpy as np

from benchmark.exceptions import (
    DimensionMismatchError,
    InvalidMetricError,
    InvalidParameterError,
    UndefinedValueError,
)
from benchmark.graphs import (
    Dag,
    NodeOrder,
    d_connected_nodes,
    reachability,
    topological_order,
)
from benchmark.simulation import Dataset
from benchmark.stats import (
    R2_ATOL,
    VARIANCE_RTOL,
    column_variances,
    r2_coefficients,
    strictly_less,
)

logger = logging.getLogger(__name__)

METRIC_NAMES = ("tpr", "fpr", "nshd", "f1", "ncod", "nsid")


@dataclass(frozen=True)
class ConfusionCounts:
    tp_dir: int
    fp_skel: int
    missing: int
    reversed: int
    t_true: int
    e_est: int
    d: int

    def __post_init__(self) -> None:
        for name, value in asdict(self).items():
            if value < 0:
                raise InvalidParameterError(f"{name}={value} is negative.")
        if self.tp_dir + self.reversed + self.fp_skel != self.e_est:
            raise InvalidParameterError(
                "Estimated edges do not add up to tp + reversed + extra."
            )
        if self.tp_dir + self.reversed + self.missing != self.t_true:
            raise InvalidParameterError(
                "True edges do not add up to tp + reversed + missing."
            )


@dataclass(frozen=True)
class MetricVector:
    """Normalized scores in the fixed order TPR, FPR, nSHD, F1, nCOD, nSID."""

    tpr: float
    fpr: float
    nshd: float
    f1: float
    ncod: float
    nsid: float

    def __post_init__(self) -> None:
        for name in METRIC_NAMES:
            value = float(getattr(self, name))
            if not 0.0 <= value <= 1.0:
                raise InvalidMetricError(f"{name}={value} outside [0, 1].")
            object.__setattr__(self, name, value)

    @classmethod
    def from_sequence(cls, values: Iterable[float]) -> MetricVector:
        values = list(values)
        if len(values) != len(METRIC_NAMES):
            raise InvalidMetricError(
                f"Expected {len(METRIC_NAMES)} metrics, got {len(values)}."
            )
        return cls(*values)

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in METRIC_NAMES])

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}


@dataclass(frozen=True)
class Evaluation:
    counts: ConfusionCounts
    shd: int
    cod: int
    sid: int
    metrics: MetricVector

    def as_dict(self) -> dict[str, Any]:
        return {
            **self.metrics.as_dict(),
            "shd": self.shd,
            "cod": self.cod,
            "sid": self.sid,
            **asdict(self.counts),
        }


def _check_same_size(truth: Dag, estimate: Dag) -> None:
    if truth.d != estimate.d:
        raise DimensionMismatchError(
            f"Graphs differ in size: {truth.d} vs {estimate.d} nodes."
        )


def confusion(truth: Dag, estimate: Dag) -> ConfusionCounts:
    _check_same_size(truth, estimate)
    true_adj, est_adj = truth.adj, estimate.adj
    skeleton = true_adj | true_adj.T
    return ConfusionCounts(
        tp_dir=int((est_adj & true_adj).sum()),
        fp_skel=int((est_adj & ~skeleton).sum()),
        missing=int((true_adj & ~(est_adj | est_adj.T)).sum()),
        reversed=int((est_adj & true_adj.T).sum()),
        t_true=int(true_adj.sum()),
        e_est=int(est_adj.sum()),
        d=truth.d,
    )


def shd(counts: ConfusionCounts) -> int:
    return counts.fp_skel + counts.missing + counts.reversed


def nshd(counts: ConfusionCounts) -> float:
    total = counts.t_true + counts.e_est
    return shd(counts) / total if total else 0.0


def tpr(counts: ConfusionCounts) -> float:
    if counts.t_true == 0:
        logger.warning("TPR on an empty ground truth; reporting 1.")
        return 1.0
    return counts.tp_dir / counts.t_true


def fpr_mod(counts: ConfusionCounts) -> float:
    """False positives over ordered non-edge pairs ``d(d-1) - T``."""
    negatives = counts.d * (counts.d - 1) - counts.t_true
    if negatives <= 0:
        return 0.0
    return (counts.reversed + counts.fp_skel) / negatives


def f1(counts: ConfusionCounts) -> float:
    if counts.t_true == 0 and counts.e_est == 0:
        return 1.0
    false_pos = counts.e_est - counts.tp_dir
    false_neg = counts.t_true - counts.tp_dir
    return 2 * counts.tp_dir / (2 * counts.tp_dir + false_pos + false_neg)


def order_from_estimate(estimate: Dag) -> NodeOrder:
    return topological_order(estimate)


def cod(truth: Dag, order: NodeOrder) -> int:
    """True edges pointing backwards in ``order``."""
    if len(order) != truth.d:
        raise DimensionMismatchError(
            f"Order covers {len(order)} nodes, graph has {truth.d}."
        )
    positions = order.positions
    return sum(
        1 for source, target in truth.edges()
        if positions[source] > positions[target]
    )


def ncod(truth: Dag, order: NodeOrder) -> float:
    return cod(truth, order) / truth.n_edges if truth.n_edges else 0.0


def is_valid_adjustment(
    truth: Dag,
    i: int,
    j: int,
    given: Iterable[int],
    reach: np.ndarray | None = None,
) -> bool:
    """Adjustment criterion for the total effect of ``i`` on ``j``.

    ``given`` must avoid every descendant of the nodes on proper causal
    paths from ``i`` to ``j`` and must block all proper non-causal paths,
    checked by d-separation in the proper backdoor graph.
    """
    if i == j:
        raise InvalidParameterError("Adjustment needs two distinct nodes.")
    given = set(given)
    if i in given or j in given:
        return False
    if reach is None:
        reach = reachability(truth)

    on_causal_path = reach[i] & (reach[:, j] | (np.arange(truth.d) == j))
    on_causal_path &= reach[i, j]
    forbidden = on_causal_path | reach[on_causal_path].any(axis=0)
    if any(forbidden[node] for node in given):
        return False

    backdoor_adj = truth.adj.copy()
    backdoor_adj[i, on_causal_path] = False
    return j not in d_connected_nodes(backdoor_adj, i, given)


def sid(truth: Dag, estimate: Dag) -> int:
    """Ordered pairs whose interventional effect the estimate gets wrong."""
    _check_same_size(truth, estimate)
    reach = reachability(truth)
    mistakes = 0
    for i in range(truth.d):
        parents = estimate.parents(i)
        # with no causal path from i the backdoor graph is the truth itself,
        # so one reachability pass covers every such j
        connected = d_connected_nodes(truth.adj, i, parents)
        for j in range(truth.d):
            if j == i:
                continue
            if j in parents:
                mistakes += bool(reach[i, j])
            elif not reach[i, j]:
                mistakes += j in connected
            else:
                mistakes += not is_valid_adjustment(
                    truth, i, j, parents, reach
                )
    return int(mistakes)


def nsid(truth: Dag, estimate: Dag, value: int | None = None) -> float:
    pairs = truth.d * (truth.d - 1)
    if not pairs:
        return 0.0
    return (sid(truth, estimate) if value is None else value) / pairs


def varsortability(truth: Dag, dataset: Dataset) -> float:
    """Share of true edges whose parent has strictly lower variance."""
    return _sortability(
        truth, dataset, column_variances(dataset.values), rtol=VARIANCE_RTOL
    )


def r2_sortability(truth: Dag, dataset: Dataset) -> float:
    """Share of true edges whose parent has strictly lower R²."""
    return _sortability(
        truth, dataset, r2_coefficients(dataset.values), atol=R2_ATOL
    )


def _sortability(
    truth: Dag,
    dataset: Dataset,
    scores: np.ndarray,
    atol: float = 0.0,
    rtol: float = 0.0,
) -> float:
    if dataset.d != truth.d:
        raise DimensionMismatchError("Dataset and graph differ in size.")
    edges = truth.edges()
    if not edges:
        raise UndefinedValueError("Sortability is undefined without edges.")
    sorted_edges = sum(
        strictly_less(scores[source], scores[target], atol, rtol)
        for source, target in edges
    )
    return float(sorted_edges / len(edges))


def evaluate(
    truth: Dag, estimate: Dag, order: NodeOrder | None = None
) -> Evaluation:
    """All raw and normalized metrics for one truth/estimate pair."""
    counts = confusion(truth, estimate)
    if order is None:
        order = order_from_estimate(estimate)
    sid_value = sid(truth, estimate)
    metrics = MetricVector(
        tpr=tpr(counts),
        fpr=fpr_mod(counts),
        nshd=nshd(counts),
        f1=f1(counts),
        ncod=ncod(truth, order),
        nsid=nsid(truth, estimate, sid_value),
    )
    return Evaluation(
        counts=counts,
        shd=shd(counts),
        cod=cod(truth, order),
        sid=sid_value,
        metrics=metrics,
    )
