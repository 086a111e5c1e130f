import itertools

import networkx as nx
import numpy as np
from django.test import SimpleTestCase, tag

from benchmark.exceptions import (
    CyclicGraphError,
    DimensionMismatchError,
    InvalidParameterError,
)
from benchmark.factors import FULL_DOMAINS
from benchmark.graphs import (
    Dag,
    GraphSpec,
    NodeOrder,
    descendants,
    er_to_sf_k,
    is_d_separated,
    reachability,
    sample_er_dag,
    sample_sf_dag,
    topological_order,
)

CHAIN = Dag.from_edges(3, [(0, 1), (1, 2)])
COLLIDER = Dag.from_edges(3, [(0, 2), (1, 2)])


def _path_is_active(graph: nx.DiGraph, path, given) -> bool:
    for before, node, after in zip(path, path[1:], path[2:]):
        collider = graph.has_edge(before, node) and graph.has_edge(after, node)
        if collider:
            if node not in given and not (nx.descendants(graph, node) & given):
                return False
        elif node in given:
            return False
    return True


def _brute_force_d_separated(dag: Dag, i, j, given) -> bool:
    graph = dag.nx_graph
    skeleton = graph.to_undirected()
    return not any(
        _path_is_active(graph, path, given)
        for path in nx.all_simple_paths(skeleton, i, j)
    )


class DagTests(SimpleTestCase):
    def test_rejects_cycles_and_self_loops(self):
        with self.assertRaises(CyclicGraphError):
            Dag([[0, 1], [1, 0]])
        with self.assertRaises(CyclicGraphError):
            Dag([[1, 0], [0, 0]])

    def test_rejects_non_square_matrix(self):
        with self.assertRaises(DimensionMismatchError):
            Dag(np.zeros((2, 3)))

    def test_adjacency_is_read_only(self):
        with self.assertRaises(ValueError):
            CHAIN.adj[0, 2] = True

    def test_parents_children_and_edges(self):
        self.assertEqual(COLLIDER.parents(2), {0, 1})
        self.assertEqual(CHAIN.children(0), {1})
        self.assertEqual(CHAIN.edges(), [(0, 1), (1, 2)])
        self.assertEqual(CHAIN.labels, ["X1", "X2", "X3"])

    def test_relabel_moves_nodes(self):
        moved = CHAIN.relabel([2, 1, 0])
        self.assertEqual(moved.edges(), [(1, 0), (2, 1)])

    def test_node_order_must_be_permutation(self):
        with self.assertRaises(InvalidParameterError):
            NodeOrder((0, 0, 1))
        self.assertEqual(list(NodeOrder((2, 0, 1)).positions), [1, 2, 0])


@tag("slow")
class ErEdgeCountTests(SimpleTestCase):
    def test_mean_edge_count_on_grid_pairs(self):
        rng = np.random.default_rng(11)
        for d, p in itertools.product((10, 20, 50), (0.2, 0.3, 0.4)):
            with self.subTest(d=d, p=p):
                counts = [
                    sample_er_dag(d, p, rng).n_edges for _ in range(10_000)
                ]
                expected = p * d * (d - 1) / 2
                self.assertAlmostEqual(
                    np.mean(counts) / expected, 1.0, delta=0.02
                )


class SamplerTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(0)

    def test_er_extremes(self):
        self.assertEqual(sample_er_dag(10, 0.0, self.rng).n_edges, 0)
        self.assertEqual(sample_er_dag(10, 1.0, self.rng).n_edges, 45)

    def test_er_mean_edge_count(self):
        counts = [
            sample_er_dag(10, 0.2, self.rng).n_edges for _ in range(10_000)
        ]
        self.assertAlmostEqual(np.mean(counts) / 9.0, 1.0, delta=0.02)

    def test_er_orientation_is_not_index_order(self):
        backwards = sum(
            int(np.tril(sample_er_dag(6, 0.5, self.rng).adj).sum())
            for _ in range(50)
        )
        self.assertGreater(backwards, 0)

    def test_sf_two_nodes(self):
        dag = sample_sf_dag(2, 1, self.rng, shuffle_labels=False)
        self.assertEqual(dag.edges(), [(0, 1)])

    def test_sf_tree(self):
        dag = sample_sf_dag(10, 1, self.rng)
        self.assertEqual(dag.n_edges, 9)
        self.assertTrue(nx.is_tree(dag.nx_graph.to_undirected()))

    def test_sf_exact_edge_count(self):
        for d, k in [(10, 2), (20, 3), (50, 5), (100, 20)]:
            dag = sample_sf_dag(d, k, self.rng)
            self.assertEqual(dag.n_edges, k * (d - k))

    def test_sf_rejects_k_not_below_d(self):
        with self.assertRaises(InvalidParameterError):
            sample_sf_dag(5, 5, self.rng)

    def test_er_to_sf_k(self):
        self.assertEqual(er_to_sf_k(10, 0.2), 1)
        self.assertEqual(er_to_sf_k(50, 0.2), 5)
        self.assertEqual(er_to_sf_k(100, 0.4), 20)

    def test_sf_and_er_edge_counts_are_comparable(self):
        # k(d - k) undershoots p d (d - 1) / 2; worst case is d=10, p=0.3
        for d in FULL_DOMAINS["nodes"]:
            for p in FULL_DOMAINS["connectivity"]:
                k = er_to_sf_k(d, p)
                ratio = k * (d - k) / (p * d * (d - 1) / 2)
                self.assertGreaterEqual(ratio, 0.65, (d, p))
                self.assertLessEqual(ratio, 1.0, (d, p))

    def test_graph_spec_maps_sf_connectivity(self):
        spec = GraphSpec.from_connectivity(50, "SF", 0.2)
        self.assertEqual(spec.k, 5)
        self.assertEqual(spec.sample(self.rng).n_edges, 225)
        with self.assertRaises(InvalidParameterError):
            GraphSpec(d=10, kind="ER", p=1.5)


class TraversalTests(SimpleTestCase):
    def test_topological_order(self):
        self.assertEqual(topological_order(CHAIN).perm, (0, 1, 2))
        self.assertEqual(topological_order(Dag.empty(3)).perm, (0, 1, 2))
        with self.assertRaises(CyclicGraphError):
            topological_order(np.array([[0, 1], [1, 0]]))

    def test_topological_order_is_linear_extension(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            dag = sample_er_dag(8, 0.4, rng)
            positions = topological_order(dag).positions
            for source, target in dag.edges():
                self.assertLess(positions[source], positions[target])

    def test_descendants(self):
        self.assertEqual(descendants(CHAIN, 0), {1, 2})
        self.assertEqual(descendants(CHAIN, 2), set())
        self.assertEqual(descendants(COLLIDER, 1), {2})

    def test_reachability_matches_descendants(self):
        rng = np.random.default_rng(4)
        dag = sample_er_dag(9, 0.3, rng)
        reach = reachability(dag)
        for node in range(dag.d):
            self.assertEqual(
                set(np.flatnonzero(reach[node])), descendants(dag, node)
            )


class DSeparationTests(SimpleTestCase):
    def test_chain_blocked_by_middle(self):
        self.assertTrue(is_d_separated(CHAIN, 0, 2, {1}))
        self.assertFalse(is_d_separated(CHAIN, 0, 2, set()))

    def test_collider_opens_when_conditioned(self):
        collider = Dag.from_edges(3, [(0, 1), (2, 1)])
        self.assertTrue(is_d_separated(collider, 0, 2, set()))
        self.assertFalse(is_d_separated(collider, 0, 2, {1}))

    def test_conditioning_on_collider_descendant(self):
        dag = Dag.from_edges(4, [(0, 1), (2, 1), (1, 3)])
        self.assertFalse(is_d_separated(dag, 0, 2, {3}))

    def test_overlapping_arguments(self):
        with self.assertRaises(InvalidParameterError):
            is_d_separated(CHAIN, 0, 2, {0})
        with self.assertRaises(InvalidParameterError):
            is_d_separated(CHAIN, 1, 1, set())

    def test_matches_path_enumeration(self):
        rng = np.random.default_rng(5)
        queries = 0
        for d in (3, 4, 5):
            for _ in range(70):
                dag = sample_er_dag(d, rng.uniform(0.2, 0.8), rng)
                for i, j in itertools.permutations(range(d), 2):
                    rest = [n for n in range(d) if n not in (i, j)]
                    for size in range(len(rest) + 1):
                        for given in itertools.combinations(rest, size):
                            given = set(given)
                            self.assertEqual(
                                is_d_separated(dag, i, j, given),
                                _brute_force_d_separated(dag, i, j, given),
                                (dag.edges(), i, j, given),
                            )
                            queries += 1
        self.assertGreaterEqual(queries, 10_000)
