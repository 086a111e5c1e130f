import itertools

import numpy as np
from django.test import SimpleTestCase

from benchmark.exceptions import (
    CyclicGraphError,
    DimensionMismatchError,
    InvalidMetricError,
    UndefinedValueError,
)
from benchmark.graphs import Dag, NodeOrder, descendants, sample_er_dag
from benchmark.metrics import (
    MetricVector,
    cod,
    confusion,
    evaluate,
    f1,
    fpr_mod,
    is_valid_adjustment,
    ncod,
    nsid,
    nshd,
    order_from_estimate,
    r2_sortability,
    shd,
    sid,
    tpr,
    varsortability,
)
from benchmark.simulation import (
    Dataset,
    MechanismKind,
    MechanismMap,
    WeightedAdjacency,
    sample_dataset,
    standardize,
)

CHAIN = Dag.from_edges(3, [(0, 1), (1, 2)])
ORACLE_TOL = 1e-8
ORACLE_DRAWS = 3


def _chain_data(weights=(2.0, 2.0), n=100_000, seed=0) -> Dataset:
    matrix = np.zeros((3, 3))
    matrix[0, 1], matrix[1, 2] = weights
    linear = MechanismKind.LINEAR
    return sample_dataset(
        CHAIN,
        WeightedAdjacency(matrix),
        MechanismMap((None, linear, linear)),
        n,
        np.random.default_rng(seed),
    )


def _oracle_mistakes(truth: Dag, estimate: Dag, rng) -> set[tuple[int, int]]:
    """Pairs whose adjusted regression misses the total effect.

    Population covariances of a linear-Gaussian model with random weights
    on ``truth``; regressing X_j on X_i and the estimated parents of i.
    """
    d = truth.d
    magnitudes = rng.uniform(0.5, 2.0, size=(d, d))
    signs = rng.choice([-1.0, 1.0], size=(d, d))
    weights = np.where(truth.adj, signs * magnitudes, 0.0)
    total = np.linalg.inv(np.eye(d) - weights)
    covariance = total.T @ total

    mistakes = set()
    for i, j in itertools.permutations(range(d), 2):
        parents = sorted(estimate.parents(i))
        if j in parents:
            estimated = 0.0
        else:
            cols = [i, *parents]
            coefs = np.linalg.solve(
                covariance[np.ix_(cols, cols)], covariance[cols, j]
            )
            estimated = coefs[0]
        if abs(estimated - total[i, j]) > ORACLE_TOL:
            mistakes.add((i, j))
    return mistakes


def _has_unique_order(graph: Dag) -> bool:
    perm = order_from_estimate(graph).perm
    return all(graph.adj[a, b] for a, b in zip(perm, perm[1:]))


def _pair_mistake(truth: Dag, estimate: Dag, i: int, j: int) -> bool:
    parents = estimate.parents(i)
    if j in parents:
        return j in descendants(truth, i)
    return not is_valid_adjustment(truth, i, j, parents)


class ConfusionTests(SimpleTestCase):
    def test_identity(self):
        counts = confusion(CHAIN, CHAIN)
        self.assertEqual(
            (counts.tp_dir, counts.fp_skel, counts.missing, counts.reversed),
            (2, 0, 0, 0),
        )
        self.assertEqual((counts.t_true, counts.e_est), (2, 2))

    def test_reversed_edge(self):
        counts = confusion(
            Dag.from_edges(2, [(0, 1)]), Dag.from_edges(2, [(1, 0)])
        )
        self.assertEqual((counts.reversed, counts.tp_dir), (1, 0))
        self.assertEqual(shd(counts), 1)
        self.assertEqual(nshd(counts), 0.5)

    def test_missing_edge(self):
        counts = confusion(CHAIN, Dag.from_edges(3, [(0, 1)]))
        self.assertEqual((counts.tp_dir, counts.missing), (1, 1))
        self.assertEqual(tpr(counts), 0.5)
        self.assertAlmostEqual(f1(counts), 2 / 3)

    def test_size_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            confusion(CHAIN, Dag.empty(4))

    def test_empty_graphs(self):
        counts = confusion(Dag.empty(3), Dag.empty(3))
        self.assertEqual(nshd(counts), 0.0)
        self.assertEqual(f1(counts), 1.0)
        with self.assertLogs("benchmark.metrics", level="WARNING"):
            self.assertEqual(tpr(counts), 1.0)

    def test_empty_estimate(self):
        counts = confusion(CHAIN, Dag.empty(3))
        self.assertEqual(tpr(counts), 0.0)
        self.assertEqual(f1(counts), 0.0)
        self.assertEqual(fpr_mod(counts), 0.0)

    def test_modified_fpr(self):
        extra = confusion(CHAIN, Dag.from_edges(3, [(0, 1), (1, 2), (0, 2)]))
        self.assertEqual(fpr_mod(extra), 0.25)
        flipped = confusion(CHAIN, Dag.from_edges(3, [(1, 0), (1, 2)]))
        self.assertEqual(fpr_mod(flipped), 0.25)


class OrderTests(SimpleTestCase):
    def test_order_from_estimate(self):
        self.assertEqual(order_from_estimate(CHAIN).perm, (0, 1, 2))
        self.assertEqual(order_from_estimate(Dag.empty(3)).perm, (0, 1, 2))

    def test_cyclic_estimate(self):
        with self.assertRaises(CyclicGraphError):
            order_from_estimate(Dag([[0, 1], [1, 0]]))

    def test_cod(self):
        self.assertEqual(cod(CHAIN, NodeOrder((0, 1, 2))), 0)
        self.assertEqual(cod(CHAIN, NodeOrder((2, 1, 0))), 2)
        self.assertEqual(ncod(CHAIN, NodeOrder((2, 1, 0))), 1.0)
        self.assertEqual(cod(CHAIN, NodeOrder((1, 0, 2))), 1)
        self.assertEqual(ncod(Dag.empty(3), NodeOrder((2, 1, 0))), 0.0)


class AdjustmentTests(SimpleTestCase):
    def test_chain(self):
        self.assertTrue(is_valid_adjustment(CHAIN, 0, 2, set()))
        self.assertFalse(is_valid_adjustment(CHAIN, 0, 2, {1}))

    def test_fork(self):
        fork = Dag.from_edges(3, [(1, 0), (1, 2)])
        self.assertFalse(is_valid_adjustment(fork, 0, 2, set()))
        self.assertTrue(is_valid_adjustment(fork, 0, 2, {1}))

    def test_sid_examples(self):
        self.assertEqual(sid(CHAIN, CHAIN), 0)
        truth = Dag.from_edges(2, [(0, 1)])
        flipped = Dag.from_edges(2, [(1, 0)])
        self.assertEqual(sid(truth, flipped), 2)
        self.assertEqual(nsid(truth, flipped), 1.0)

    def test_sid_on_empty_truth(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            estimate = sample_er_dag(5, 0.5, rng)
            self.assertEqual(sid(Dag.empty(5), estimate), 0)

    def test_sid_matches_linear_gaussian_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(500):
            d = int(rng.integers(2, 5))
            truth = sample_er_dag(d, rng.uniform(0.2, 0.9), rng)
            estimate = sample_er_dag(d, rng.uniform(0.0, 0.9), rng)
            # a pair is correct only if it is correct under every draw
            expected = set().union(
                *(
                    _oracle_mistakes(truth, estimate, rng)
                    for _ in range(ORACLE_DRAWS)
                )
            )
            found = {
                (i, j)
                for i, j in itertools.permutations(range(d), 2)
                if _pair_mistake(truth, estimate, i, j)
            }
            context = (truth.edges(), estimate.edges())
            self.assertEqual(found, expected, context)
            self.assertEqual(sid(truth, estimate), len(expected))


class IdentityTests(SimpleTestCase):
    def test_truth_scores_perfectly(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            truth = sample_er_dag(int(rng.integers(2, 12)), 0.4, rng)
            if truth.n_edges == 0:
                truth = Dag.from_edges(truth.d, [(0, 1)])
            metrics = evaluate(truth, truth).metrics
            self.assertEqual(
                tuple(metrics.as_array()), (1.0, 0.0, 0.0, 1.0, 0.0, 0.0)
            )

    def test_metrics_are_permutation_equivariant(self):
        rng = np.random.default_rng(3)
        unique_orders = 0
        for _ in range(200):
            truth = sample_er_dag(6, 0.4, rng)
            estimate = sample_er_dag(6, rng.choice([0.4, 0.9]), rng)
            perm = rng.permutation(6)
            original = evaluate(truth, estimate)
            moved = evaluate(truth.relabel(perm), estimate.relabel(perm))
            self.assertEqual(original.counts, moved.counts)
            self.assertEqual(original.shd, moved.shd)
            self.assertEqual(original.sid, moved.sid)
            for name in ("tpr", "fpr", "nshd", "f1", "nsid"):
                self.assertEqual(
                    getattr(original.metrics, name),
                    getattr(moved.metrics, name),
                )
            if _has_unique_order(estimate):
                unique_orders += 1
                self.assertEqual(original.metrics, moved.metrics)
                self.assertEqual(original.cod, moved.cod)
        self.assertGreater(unique_orders, 0)

    def test_ncod_ties_follow_index_order(self):
        truth = Dag.from_edges(2, [(0, 1)])
        swapped = Dag.from_edges(2, [(1, 0)])
        self.assertEqual(evaluate(truth, Dag.empty(2)).metrics.ncod, 0.0)
        self.assertEqual(evaluate(swapped, Dag.empty(2)).metrics.ncod, 1.0)

    def test_metric_vector_range(self):
        with self.assertRaises(InvalidMetricError):
            MetricVector(1.2, 0, 0, 1, 0, 0)
        with self.assertRaises(InvalidMetricError):
            MetricVector.from_sequence([0.5] * 5)


class SortabilityTests(SimpleTestCase):
    def test_raw_chain_is_varsortable(self):
        self.assertEqual(varsortability(CHAIN, _chain_data()), 1.0)

    def test_standardized_chain(self):
        self.assertEqual(
            varsortability(CHAIN, standardize(_chain_data())), 0.0
        )

    def test_inflated_parent(self):
        truth = Dag.from_edges(2, [(0, 1)])
        rng = np.random.default_rng(4)
        parent = 5.0 * rng.standard_normal(10_000)
        child = 0.1 * parent + rng.standard_normal(10_000)
        ds = Dataset(np.column_stack([parent, child]))
        self.assertEqual(varsortability(truth, ds), 0.0)

    def test_r2_sortability_is_scale_invariant(self):
        ds = _chain_data(n=20_000)
        self.assertAlmostEqual(
            r2_sortability(CHAIN, ds),
            r2_sortability(CHAIN, standardize(ds)),
        )

    def test_no_edges(self):
        with self.assertRaises(UndefinedValueError):
            varsortability(Dag.empty(3), _chain_data(n=100))

    def test_r2_sortability_with_constant_column(self):
        ds = _chain_data(n=1000)
        values = ds.values.copy()
        values[:, 0] = 1.0
        with self.assertLogs("benchmark.stats", level="WARNING"):
            value = r2_sortability(CHAIN, Dataset(values))
        # the constant root has R² 0, below its child; X2 and X3 tie
        self.assertEqual(value, 0.5)
