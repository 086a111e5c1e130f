from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
import pandas as pd

from benchmark.exceptions import (
    InvalidMetricError,
    InvalidParameterError,
    MissingDataError,
)
from benchmark.factors import DEFAULT_BASELINES, FACTORS
from benchmark.metrics import METRIC_NAMES, MetricVector

logger = logging.getLogger(__name__)


class Objective(str, Enum):
    MAX = "max"
    MIN = "min"


METRIC_OBJECTIVES = (
    Objective.MAX,  # tpr
    Objective.MIN,  # fpr
    Objective.MIN,  # nshd
    Objective.MAX,  # f1
    Objective.MIN,  # ncod
    Objective.MIN,  # nsid
)


@dataclass(frozen=True)
class ScenarioPair:
    s_plus: MetricVector
    s_minus: MetricVector


@dataclass(frozen=True)
class DosScore:
    value: float
    dist_plus: float
    dist_minus: float


def scenarios(
    objectives: Sequence[Objective | str] = METRIC_OBJECTIVES,
) -> ScenarioPair:
    """Best and worst anchor per metric from its optimization direction."""
    if len(objectives) != len(METRIC_NAMES):
        raise InvalidParameterError(
            f"Expected {len(METRIC_NAMES)} objectives, got {len(objectives)}."
        )
    objectives = [Objective(objective) for objective in objectives]
    best = [1.0 if obj is Objective.MAX else 0.0 for obj in objectives]
    worst = [1.0 - value for value in best]
    return ScenarioPair(
        s_plus=MetricVector.from_sequence(best),
        s_minus=MetricVector.from_sequence(worst),
    )


DEFAULT_SCENARIOS = scenarios()


def dos_single(
    metrics: MetricVector | Sequence[float],
    scenario: ScenarioPair = DEFAULT_SCENARIOS,
) -> DosScore:
    """Relative closeness of a metric vector to the ideal anchor."""
    if not isinstance(metrics, MetricVector):
        metrics = MetricVector.from_sequence(metrics)
    vector = metrics.as_array()
    dist_plus = float(np.linalg.norm(vector - scenario.s_plus.as_array()))
    dist_minus = float(np.linalg.norm(vector - scenario.s_minus.as_array()))
    total = dist_plus + dist_minus
    if total == 0:
        raise InvalidMetricError("Best and worst scenarios coincide.")
    return DosScore(dist_minus / total, dist_plus, dist_minus)


def records_frame(records: Any) -> pd.DataFrame:
    """Tabulate run records given as a frame, dicts or record objects."""
    if isinstance(records, pd.DataFrame):
        return records
    rows = [
        record.as_dict() if hasattr(record, "as_dict") else dict(record)
        for record in records
    ]
    return pd.DataFrame(rows)


def _scored(frame: pd.DataFrame) -> pd.DataFrame:
    if frame.empty or "dos" not in frame:
        return frame.iloc[0:0]
    return frame[frame["dos"].notna()]


def dos_aggregate(
    records: Iterable[Mapping] | pd.DataFrame, model: str
) -> float:
    frame = _scored(records_frame(records))
    values = frame.loc[frame["model"] == model, "dos"] if len(frame) else []
    if len(values) == 0:
        raise MissingDataError(f"No scored records for model {model!r}.")
    return float(np.mean(values))


@dataclass
class SensitivityResult:
    factor: str
    baseline: Any
    table: pd.DataFrame
    skipped: list[dict[str, Any]] = field(default_factory=list)

    @property
    def delta_sums(self) -> pd.Series:
        return self.table["delta_sum"]


def factor_sensitivity(
    records: Iterable[Mapping] | pd.DataFrame,
    factor: str,
    baseline: Any = None,
) -> SensitivityResult:
    """Summed absolute DOS change against the baseline level, per group.

    Groups hold records that agree on every other factor, the model and the
    replicate. Groups missing a level are skipped and listed.
    """
    if factor not in FACTORS:
        raise InvalidParameterError(f"Unknown factor {factor!r}.")
    if baseline is None:
        baseline = DEFAULT_BASELINES[factor]
    frame = _scored(records_frame(records))
    keys = [
        name for name in (*FACTORS, "model", "replicate")
        if name != factor and name in frame
    ]
    columns = [*keys, "delta_sum"]
    if frame.empty:
        empty = pd.DataFrame(columns=columns)
        return SensitivityResult(factor, baseline, empty)

    levels = sorted(frame[factor].unique(), key=str)
    if baseline not in levels:
        raise MissingDataError(
            f"Baseline {baseline!r} of {factor!r} not present in records."
        )
    rows, skipped = [], []
    grouped = frame.groupby(keys, sort=True, dropna=False) if keys else [
        ((), frame)
    ]
    for group_key, group in grouped:
        group_key = group_key if isinstance(group_key, tuple) else (group_key,)
        by_level = group.groupby(factor)["dos"].mean()
        key_dict = dict(zip(keys, group_key))
        if set(by_level.index) != set(levels):
            logger.warning(
                "Skipping %s group %s: levels %s of %s present",
                factor, key_dict, sorted(by_level.index, key=str), levels,
            )
            skipped.append(key_dict)
            continue
        reference = by_level[baseline]
        delta_sum = float(
            sum(
                abs(value - reference)
                for level, value in by_level.items()
                if level != baseline
            )
        )
        rows.append({**key_dict, "delta_sum": delta_sum})
    return SensitivityResult(
        factor, baseline, pd.DataFrame(rows, columns=columns), skipped
    )


def conditional_means(
    records: Iterable[Mapping] | pd.DataFrame,
    factor_a: str,
    factor_b: str,
) -> pd.DataFrame:
    """Mean DOS and count per observed (level_a, level_b) cell.

    Cells without scored records are absent from the result, never zero.
    """
    frame = _scored(records_frame(records))
    for name in (factor_a, factor_b):
        if name not in frame:
            raise MissingDataError(f"Records have no column {name!r}.")
    return (
        frame.groupby([factor_a, factor_b], sort=True)["dos"]
        .agg(mean_dos="mean", count="count")
        .reset_index()
    )
