from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator

import networkx as nx
import numpy as np

from benchmark.exceptions import (
    CyclicGraphError,
    DimensionMismatchError,
    InvalidParameterError,
)

logger = logging.getLogger(__name__)


def node_labels(d: int) -> list[str]:
    return [f"X{i + 1}" for i in range(d)]


class GraphKind(str, Enum):
    ER = "ER"
    SF = "SF"


class Dag:
    """Immutable labelled DAG backed by a boolean adjacency matrix.

    ``adj[i, j]`` is True when the graph has the edge ``i -> j``.
    """

    def __init__(self, adj: Iterable) -> None:
        matrix = np.array(adj, dtype=bool)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(
                f"Adjacency must be square, got shape {matrix.shape}."
            )
        if matrix.shape[0] < 1:
            raise InvalidParameterError("A graph needs at least one node.")
        if matrix.diagonal().any():
            raise CyclicGraphError("Self-loops are not allowed in a DAG.")
        if not nx.is_directed_acyclic_graph(_to_networkx(matrix)):
            raise CyclicGraphError("Adjacency matrix contains a cycle.")
        matrix.setflags(write=False)
        self._adj = matrix

    @classmethod
    def empty(cls, d: int) -> Dag:
        return cls(np.zeros((d, d), dtype=bool))

    @classmethod
    def from_edges(cls, d: int, edges: Iterable[tuple[int, int]]) -> Dag:
        matrix = np.zeros((d, d), dtype=bool)
        for source, target in edges:
            matrix[source, target] = True
        return cls(matrix)

    @property
    def adj(self) -> np.ndarray:
        return self._adj

    @property
    def d(self) -> int:
        return self._adj.shape[0]

    @property
    def n_edges(self) -> int:
        return int(self._adj.sum())

    @property
    def labels(self) -> list[str]:
        return node_labels(self.d)

    def edges(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self._adj))]

    def parents(self, node: int) -> frozenset[int]:
        return frozenset(int(i) for i in np.flatnonzero(self._adj[:, node]))

    def children(self, node: int) -> frozenset[int]:
        return frozenset(int(j) for j in np.flatnonzero(self._adj[node]))

    @cached_property
    def nx_graph(self) -> nx.DiGraph:
        return _to_networkx(self._adj)

    def relabel(self, perm: Iterable[int]) -> Dag:
        """Move node ``i`` to position ``perm[i]``."""
        perm = np.asarray(list(perm))
        matrix = np.zeros_like(self._adj)
        matrix[np.ix_(perm, perm)] = self._adj
        return Dag(matrix)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dag):
            return NotImplemented
        return np.array_equal(self._adj, other._adj)

    def __hash__(self) -> int:
        return hash((self.d, self._adj.tobytes()))

    def __repr__(self) -> str:
        return f"Dag(d={self.d}, edges={self.n_edges})"


def _to_networkx(matrix: np.ndarray) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(matrix.shape[0]))
    graph.add_edges_from(
        (int(i), int(j)) for i, j in zip(*np.nonzero(matrix))
    )
    return graph


@dataclass(frozen=True)
class NodeOrder:
    """Causal order; ``perm[k]`` is the k-th variable in the order."""

    perm: tuple[int, ...]

    def __post_init__(self) -> None:
        perm = tuple(int(node) for node in self.perm)
        if sorted(perm) != list(range(len(perm))):
            raise InvalidParameterError(
                f"Order {perm} is not a permutation of 0..{len(perm) - 1}."
            )
        object.__setattr__(self, "perm", perm)

    @classmethod
    def identity(cls, d: int) -> NodeOrder:
        return cls(tuple(range(d)))

    @property
    def positions(self) -> np.ndarray:
        positions = np.empty(len(self.perm), dtype=int)
        positions[list(self.perm)] = np.arange(len(self.perm))
        return positions

    def __iter__(self) -> Iterator[int]:
        return iter(self.perm)

    def __len__(self) -> int:
        return len(self.perm)


@dataclass(frozen=True)
class GraphSpec:
    d: int
    kind: GraphKind
    p: float | None = None
    k: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", GraphKind(self.kind))
        if self.d < 1:
            raise InvalidParameterError("Node count must be at least 1.")
        if self.kind is GraphKind.ER:
            if self.p is None or self.k is not None:
                raise InvalidParameterError("ER graphs take p and no k.")
            if not 0 <= self.p <= 1:
                raise InvalidParameterError(f"p={self.p} outside [0, 1].")
        else:
            if self.k is None or self.p is not None:
                raise InvalidParameterError("SF graphs take k and no p.")
            if self.k < 1:
                raise InvalidParameterError(f"k={self.k} must be >= 1.")

    @classmethod
    def from_connectivity(
        cls, d: int, kind: GraphKind | str, p: float
    ) -> GraphSpec:
        """Build a spec from an ER edge probability, mapping SF to its k."""
        kind = GraphKind(kind)
        if kind is GraphKind.ER:
            return cls(d=d, kind=kind, p=p)
        return cls(d=d, kind=kind, k=er_to_sf_k(d, p))

    def sample(self, rng: np.random.Generator) -> Dag:
        if self.kind is GraphKind.ER:
            return sample_er_dag(self.d, self.p, rng)
        return sample_sf_dag(self.d, self.k, rng)


def sample_er_dag(d: int, p: float, rng: np.random.Generator) -> Dag:
    """Erdős-Rényi DAG oriented along a uniformly random permutation."""
    return sample_ordered_er_dag(d, p, rng)[0]


def sample_ordered_er_dag(
    d: int, p: float, rng: np.random.Generator
) -> tuple[Dag, NodeOrder]:
    """ER DAG together with the random permutation that orients it."""
    if d < 1 or not 0 <= p <= 1:
        raise InvalidParameterError(f"Invalid ER parameters d={d}, p={p}.")
    perm = rng.permutation(d)
    upper = np.triu(rng.random((d, d)) < p, k=1)
    matrix = np.zeros((d, d), dtype=bool)
    matrix[np.ix_(perm, perm)] = upper
    return Dag(matrix), NodeOrder(tuple(perm))


def sample_sf_dag(
    d: int,
    k: int,
    rng: np.random.Generator,
    shuffle_labels: bool = True,
) -> Dag:
    """Scale-free DAG grown by preferential attachment.

    Starts from ``k`` isolated seed nodes; every later node gets ``k``
    parents among the existing nodes, drawn without replacement with
    probability proportional to their current degree. The edge count is
    always ``k * (d - k)``. Labels are shuffled unless told otherwise so
    that index order carries no information about the causal order.
    """
    if not 1 <= k < d:
        raise InvalidParameterError(f"SF needs 1 <= k < d, got k={k}, d={d}.")
    matrix = np.zeros((d, d), dtype=bool)
    degree = np.zeros(d, dtype=float)
    for new in range(k, d):
        weights = degree[:new]
        total = weights.sum()
        probs = weights / total if total > 0 else np.full(new, 1.0 / new)
        chosen = rng.choice(new, size=k, replace=False, p=probs)
        matrix[chosen, new] = True
        degree[chosen] += 1
        degree[new] += k
    dag = Dag(matrix)
    if shuffle_labels:
        dag = dag.relabel(rng.permutation(d))
    return dag


def er_to_sf_k(d: int, p: float) -> int:
    """Attachment count matching the expected ER edges per node."""
    if not 0 < p <= 1:
        raise InvalidParameterError(f"p={p} outside (0, 1].")
    expected_edges = p * d * (d - 1) / 2
    # half-up rounding, not banker's rounding
    return max(1, math.floor(expected_edges / d + 0.5))


def topological_order(graph: Dag | np.ndarray) -> NodeOrder:
    """Kahn order with the smallest available index emitted first."""
    if isinstance(graph, Dag):
        nx_graph = graph.nx_graph
    else:
        nx_graph = _to_networkx(np.asarray(graph, dtype=bool))
    try:
        return NodeOrder(tuple(nx.lexicographical_topological_sort(nx_graph)))
    except nx.NetworkXUnfeasible as exc:
        raise CyclicGraphError("Graph has no topological order.") from exc


def descendants(graph: Dag, node: int) -> frozenset[int]:
    _check_node(graph, node)
    return frozenset(nx.descendants(graph.nx_graph, node))


def reachability(graph: Dag) -> np.ndarray:
    """Boolean matrix with ``reach[i, j]`` True iff a directed path i ~> j."""
    reach = np.zeros((graph.d, graph.d), dtype=bool)
    for node in reversed(topological_order(graph).perm):
        for child in graph.children(node):
            reach[node, child] = True
            reach[node] |= reach[child]
    return reach


def d_connected_nodes(
    adj: np.ndarray, source: int, given: Iterable[int]
) -> set[int]:
    """Nodes reachable from ``source`` along trails active given ``given``.

    Reachability (Bayes-ball) procedure: a first pass marks ``given`` and
    its ancestors, a second pass walks (node, direction) states. The source
    itself is part of the result.
    """
    adj = np.asarray(adj, dtype=bool)
    given = set(given)

    observed_or_ancestor = set()
    pending = list(given)
    while pending:
        node = pending.pop()
        if node in observed_or_ancestor:
            continue
        observed_or_ancestor.add(node)
        pending.extend(int(p) for p in np.flatnonzero(adj[:, node]))

    up, down = "up", "down"
    reachable: set[int] = set()
    visited: set[tuple[int, str]] = set()
    queue = deque([(source, up)])
    while queue:
        node, direction = queue.popleft()
        if (node, direction) in visited:
            continue
        visited.add((node, direction))
        if node not in given:
            reachable.add(node)
        if direction == up and node not in given:
            for parent in np.flatnonzero(adj[:, node]):
                queue.append((int(parent), up))
            for child in np.flatnonzero(adj[node]):
                queue.append((int(child), down))
        elif direction == down:
            if node not in given:
                for child in np.flatnonzero(adj[node]):
                    queue.append((int(child), down))
            if node in observed_or_ancestor:
                for parent in np.flatnonzero(adj[:, node]):
                    queue.append((int(parent), up))
    return reachable


def is_d_separated(graph: Dag, i: int, j: int, given: Iterable[int]) -> bool:
    given = set(given)
    for node in (i, j, *given):
        _check_node(graph, node)
    if i == j or i in given or j in given:
        raise InvalidParameterError(
            "d-separation needs distinct endpoints outside the given set."
        )
    return j not in d_connected_nodes(graph.adj, i, given)


def _check_node(graph: Dag, node: int) -> None:
    if not 0 <= node < graph.d:
        raise InvalidParameterError(
            f"Node {node} outside 0..{graph.d - 1}."
        )
