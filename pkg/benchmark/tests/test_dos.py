import numpy as np
from django.test import SimpleTestCase

from benchmark.dos import (
    DEFAULT_SCENARIOS,
    conditional_means,
    dos_aggregate,
    dos_single,
    factor_sensitivity,
    scenarios,
)
from benchmark.exceptions import (
    InvalidMetricError,
    InvalidParameterError,
    MissingDataError,
)


def _record(dos, model="m", replicate=0, **factors):
    base = {
        "sample_size": 2500,
        "nodes": 10,
        "graph_type": "ER",
        "connectivity": 0.2,
        "relu_fraction": 0.0,
        "w_upper": 1.0,
        "scale": "original",
    }
    return {
        **base,
        **factors,
        "model": model,
        "replicate": replicate,
        "status": "ok",
        "dos": dos,
    }


class ScenarioTests(SimpleTestCase):
    def test_default_objectives(self):
        self.assertEqual(
            tuple(DEFAULT_SCENARIOS.s_plus.as_array()), (1, 0, 0, 1, 0, 0)
        )
        self.assertEqual(
            tuple(DEFAULT_SCENARIOS.s_minus.as_array()), (0, 1, 1, 0, 1, 1)
        )

    def test_uniform_objectives(self):
        maximize = scenarios(["max"] * 6)
        self.assertEqual(tuple(maximize.s_plus.as_array()), (1.0,) * 6)
        self.assertEqual(tuple(maximize.s_minus.as_array()), (0.0,) * 6)
        minimize = scenarios(["min"] * 6)
        self.assertEqual(tuple(minimize.s_plus.as_array()), (0.0,) * 6)
        self.assertEqual(tuple(minimize.s_minus.as_array()), (1.0,) * 6)

    def test_wrong_arity(self):
        with self.assertRaises(InvalidParameterError):
            scenarios(["max"] * 5)


class DosSingleTests(SimpleTestCase):
    def test_anchors(self):
        self.assertEqual(dos_single(DEFAULT_SCENARIOS.s_plus).value, 1.0)
        self.assertEqual(dos_single(DEFAULT_SCENARIOS.s_minus).value, 0.0)
        self.assertEqual(dos_single([0.5] * 6).value, 0.5)

    def test_out_of_range_component(self):
        with self.assertRaises(InvalidMetricError):
            dos_single([1.0, 0.0, 0.0, 1.0, 0.0, -0.1])

    def test_bounds_on_random_vectors(self):
        rng = np.random.default_rng(0)
        for vector in rng.random((100_000, 6)):
            value = dos_single(vector).value
            self.assertTrue(0.0 <= value <= 1.0)

    def test_improving_one_metric_raises_dos(self):
        rng = np.random.default_rng(1)
        ideal = DEFAULT_SCENARIOS.s_plus.as_array()
        for component in range(6):
            for vector in rng.uniform(0.1, 0.9, size=(200, 6)):
                better = vector.copy()
                better[component] += 0.05 * np.sign(
                    ideal[component] - vector[component]
                )
                with self.subTest(component=component):
                    self.assertGreater(
                        dos_single(better).value, dos_single(vector).value
                    )


class AggregateTests(SimpleTestCase):
    def test_means(self):
        self.assertEqual(dos_aggregate([_record(0.7)], "m"), 0.7)
        self.assertEqual(
            dos_aggregate([_record(0.0), _record(1.0)], "m"), 0.5
        )
        self.assertAlmostEqual(
            dos_aggregate(
                [_record(0.2), _record(0.4), _record(0.9)], "m"
            ),
            0.5,
        )

    def test_failed_runs_are_excluded(self):
        records = [_record(0.4), {**_record(None), "status": "failed"}]
        self.assertEqual(dos_aggregate(records, "m"), 0.4)

    def test_no_records(self):
        with self.assertRaises(MissingDataError):
            dos_aggregate([], "m")
        with self.assertRaises(MissingDataError):
            dos_aggregate([_record(0.5)], "other")


class SensitivityTests(SimpleTestCase):
    def test_two_levels(self):
        records = [
            _record(0.8, sample_size=2500),
            _record(0.6, sample_size=250),
        ]
        result = factor_sensitivity(records, "sample_size")
        self.assertEqual(result.baseline, 2500)
        self.assertAlmostEqual(result.delta_sums.iloc[0], 0.2)

    def test_identical_levels(self):
        records = [_record(0.5, w_upper=w) for w in (1.0, 2.0, 3.0)]
        result = factor_sensitivity(records, "w_upper")
        self.assertEqual(result.delta_sums.iloc[0], 0.0)

    def test_node_levels(self):
        records = [
            _record(dos, nodes=nodes)
            for nodes, dos in zip((10, 20, 50, 100), (0.9, 0.7, 0.6, 0.5))
        ]
        result = factor_sensitivity(records, "nodes", baseline=10)
        self.assertAlmostEqual(result.delta_sums.iloc[0], 0.9)

    def test_incomplete_group_is_skipped(self):
        records = [
            _record(0.8, sample_size=2500),
            _record(0.6, sample_size=250),
            _record(0.5, sample_size=2500, replicate=1),
        ]
        result = factor_sensitivity(records, "sample_size")
        self.assertEqual(len(result.table), 1)
        self.assertEqual(len(result.skipped), 1)
        self.assertEqual(result.skipped[0]["replicate"], 1)

    def test_missing_baseline(self):
        records = [_record(0.8, nodes=20), _record(0.6, nodes=50)]
        with self.assertRaises(MissingDataError):
            factor_sensitivity(records, "nodes")

    def test_unknown_factor(self):
        with self.assertRaises(InvalidParameterError):
            factor_sensitivity([_record(0.5)], "colour")


class ConditionalMeansTests(SimpleTestCase):
    def test_single_record(self):
        table = conditional_means([_record(0.3)], "nodes", "scale")
        self.assertEqual(len(table), 1)
        self.assertEqual(table["mean_dos"].iloc[0], 0.3)

    def test_constant_across_second_factor(self):
        records = [
            _record(level / 100, nodes=level, scale=scale)
            for level in (10, 20)
            for scale in ("original", "standardized")
        ]
        table = conditional_means(records, "nodes", "scale")
        for _, rows in table.groupby("nodes"):
            self.assertEqual(rows["mean_dos"].nunique(), 1)

    def test_two_by_two(self):
        values = {
            (10, "ER"): 0.2,
            (10, "SF"): 0.4,
            (20, "ER"): 0.6,
            (20, "SF"): 0.8,
        }
        records = [
            _record(dos, nodes=nodes, graph_type=kind, replicate=rep)
            for (nodes, kind), dos in values.items()
            for rep in range(2)
        ]
        table = conditional_means(records, "nodes", "graph_type")
        for row in table.to_dict("records"):
            self.assertAlmostEqual(
                row["mean_dos"], values[(row["nodes"], row["graph_type"])]
            )
            self.assertEqual(row["count"], 2)

    def test_empty_cells_are_absent(self):
        records = [
            _record(0.2, nodes=10, graph_type="ER"),
            _record(0.8, nodes=20, graph_type="SF"),
        ]
        table = conditional_means(records, "nodes", "graph_type")
        self.assertEqual(len(table), 2)
