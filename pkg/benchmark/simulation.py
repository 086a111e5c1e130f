from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Any

import numpy as np
import pandas as pd

from benchmark.exceptions import (
    DegenerateColumnError,
    DimensionMismatchError,
    InvalidParameterError,
)
from benchmark.graphs import Dag, GraphSpec, node_labels, topological_order

logger = logging.getLogger(__name__)

W_LOWER = 0.5
N_FULL = 2500
N_SMALL = 250
MIN_COLUMN_STD = 1e-12


class MechanismKind(str, Enum):
    LINEAR = "linear"
    RELU = "relu"


class Scale(str, Enum):
    ORIGINAL = "original"
    STANDARDIZED = "standardized"


class WeightedAdjacency:
    """Real edge-coefficient matrix; ``W[i, j]`` weighs the edge i -> j."""

    def __init__(self, weights: Any) -> None:
        matrix = np.array(weights, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(
                f"Weights must be square, got shape {matrix.shape}."
            )
        matrix.setflags(write=False)
        self._weights = matrix

    @property
    def W(self) -> np.ndarray:  # noqa: N802
        return self._weights

    @property
    def d(self) -> int:
        return self._weights.shape[0]

    def support(self) -> np.ndarray:
        return self._weights != 0

    def matches(self, dag: Dag) -> bool:
        return self.d == dag.d and np.array_equal(self.support(), dag.adj)

    def __repr__(self) -> str:
        nnz = int(self.support().sum())
        return f"WeightedAdjacency(d={self.d}, nnz={nnz})"


@dataclass(frozen=True)
class MechanismMap:
    """Mechanism per node; roots carry ``None`` (noise only)."""

    kinds: tuple[MechanismKind | None, ...]

    def kind(self, node: int) -> MechanismKind | None:
        return self.kinds[node]

    @property
    def relu_nodes(self) -> list[int]:
        return [
            node
            for node, kind in enumerate(self.kinds)
            if kind is MechanismKind.RELU
        ]


@dataclass(frozen=True)
class Provenance:
    master_seed: int = 0
    config_id: str = ""
    replicate: int = 0
    subsampled: bool = False


@dataclass(frozen=True, eq=False)
class Dataset:
    values: np.ndarray
    scale: Scale = Scale.ORIGINAL
    provenance: Provenance = field(default_factory=Provenance)

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise InvalidParameterError(
                f"Dataset needs an n x d matrix, got shape {values.shape}."
            )
        if not np.isfinite(values).all():
            raise InvalidParameterError("Dataset contains non-finite values.")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "scale", Scale(self.scale))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @property
    def labels(self) -> list[str]:
        return node_labels(self.d)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.values, columns=self.labels)


@dataclass(frozen=True)
class SimConfig:
    graph: GraphSpec
    relu_fraction: float = 0.0
    w_upper: float = 1.0
    w_lower: float = W_LOWER
    n_full: int = N_FULL
    n_small: int = N_SMALL
    sample_size: int = N_FULL
    scale: Scale = Scale.ORIGINAL
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "scale", Scale(self.scale))
        if not 0 <= self.relu_fraction <= 1:
            raise InvalidParameterError(
                f"ReLU fraction {self.relu_fraction} outside [0, 1]."
            )
        if not 0 < self.w_lower <= self.w_upper:
            raise InvalidParameterError(
                f"Weight bounds [{self.w_lower}, {self.w_upper}] are invalid."
            )
        if not 1 <= self.n_small <= self.n_full:
            raise InvalidParameterError("Need 1 <= n_small <= n_full.")
        if self.sample_size not in (self.n_full, self.n_small):
            raise InvalidParameterError(
                f"Sample size {self.sample_size} is neither "
                f"{self.n_full} nor {self.n_small}."
            )

    def as_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["graph"]["kind"] = self.graph.kind.value
        data["scale"] = self.scale.value
        return data


@dataclass(frozen=True, eq=False)
class Simulation:
    """One base draw: ground truth plus the full-size original-scale data."""

    dag: Dag
    weights: WeightedAdjacency
    mechanisms: MechanismMap
    dataset: Dataset


def sample_weights(
    dag: Dag,
    w_lower: float,
    w_upper: float,
    rng: np.random.Generator,
) -> WeightedAdjacency:
    """Edge weights uniform on [-w_upper, -w_lower] U [w_lower, w_upper]."""
    if not 0 < w_lower <= w_upper:
        raise InvalidParameterError(
            f"Weight bounds [{w_lower}, {w_upper}] are invalid."
        )
    magnitudes = rng.uniform(w_lower, w_upper, size=(dag.d, dag.d))
    signs = rng.choice([-1.0, 1.0], size=(dag.d, dag.d))
    return WeightedAdjacency(np.where(dag.adj, signs * magnitudes, 0.0))


def assign_mechanisms(
    dag: Dag, relu_fraction: float, rng: np.random.Generator
) -> MechanismMap:
    if not 0 <= relu_fraction <= 1:
        raise InvalidParameterError(
            f"ReLU fraction {relu_fraction} outside [0, 1]."
        )
    is_relu = rng.random(dag.d) < relu_fraction
    has_parents = dag.adj.any(axis=0)
    kinds = tuple(
        None
        if not has_parents[node]
        else (MechanismKind.RELU if is_relu[node] else MechanismKind.LINEAR)
        for node in range(dag.d)
    )
    return MechanismMap(kinds)


def sample_dataset(
    dag: Dag,
    weights: WeightedAdjacency,
    mechanisms: MechanismMap,
    n: int,
    rng: np.random.Generator,
    provenance: Provenance | None = None,
) -> Dataset:
    """Sequential additive-noise sampling along the topological order.

    Linear nodes: ``X_i = X W_i + N_i``; ReLU nodes:
    ``X_i = max(X W_i, 0) + N_i``, the ReLU acting on the aggregated parent
    sum. Noise is standard normal for every node.
    """
    if n < 1:
        raise InvalidParameterError(f"Sample count must be >= 1, got {n}.")
    if not weights.matches(dag):
        raise InvalidParameterError(
            "Weight support does not match the graph's edges."
        )
    if len(mechanisms.kinds) != dag.d:
        raise DimensionMismatchError("Mechanism map has the wrong size.")

    noise = rng.standard_normal((n, dag.d))
    values = np.zeros((n, dag.d))
    for node in topological_order(dag):
        kind = mechanisms.kind(node)
        if kind is None:
            values[:, node] = noise[:, node]
            continue
        aggregate = values @ weights.W[:, node]
        if kind is MechanismKind.RELU:
            aggregate = np.maximum(aggregate, 0.0)
        values[:, node] = aggregate + noise[:, node]
    return Dataset(values, Scale.ORIGINAL, provenance or Provenance())


def standardize(dataset: Dataset) -> Dataset:
    """Per-column z-scores using the dataset's own mean and n-1 deviation."""
    if dataset.n < 2:
        raise DegenerateColumnError("Standardizing needs at least two rows.")
    mean = dataset.values.mean(axis=0)
    std = dataset.values.std(axis=0, ddof=1)
    degenerate = np.flatnonzero(std <= MIN_COLUMN_STD)
    if degenerate.size:
        labels = [dataset.labels[i] for i in degenerate]
        raise DegenerateColumnError(f"Near-constant columns: {labels}.")
    return replace(
        dataset,
        values=(dataset.values - mean) / std,
        scale=Scale.STANDARDIZED,
    )


def subsample(
    dataset: Dataset, m: int, rng: np.random.Generator
) -> Dataset:
    if not 1 <= m <= dataset.n:
        raise InvalidParameterError(
            f"Cannot draw {m} rows from a dataset with {dataset.n}."
        )
    rows = np.sort(rng.choice(dataset.n, size=m, replace=False))
    return replace(
        dataset,
        values=dataset.values[rows],
        provenance=replace(dataset.provenance, subsampled=True),
    )


def simulate(
    config: SimConfig,
    rng: np.random.Generator,
    provenance: Provenance | None = None,
) -> Simulation:
    """Draw truth, weights, mechanisms and the ``n_full`` base dataset."""
    dag = config.graph.sample(rng)
    weights = sample_weights(dag, config.w_lower, config.w_upper, rng)
    mechanisms = assign_mechanisms(dag, config.relu_fraction, rng)
    dataset = sample_dataset(
        dag, weights, mechanisms, config.n_full, rng, provenance
    )
    logger.debug(
        "Simulated %s with %d edges and %d ReLU nodes",
        config.graph,
        dag.n_edges,
        len(mechanisms.relu_nodes),
    )
    return Simulation(dag, weights, mechanisms, dataset)


def derive_variant(
    base: Dataset,
    sample_size: int,
    scale: Scale | str,
    rng: np.random.Generator,
) -> Dataset:
    """Small-sample and/or standardized variant of the shared base draw."""
    variant = base
    if sample_size != base.n:
        variant = subsample(variant, sample_size, rng)
    if Scale(scale) is Scale.STANDARDIZED:
        variant = standardize(variant)
    return variant
