from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import pandas as pd
from scipy.stats import spearmanr

from benchmark.dos import (
    METRIC_OBJECTIVES,
    Objective,
    conditional_means,
    factor_sensitivity,
    records_frame,
)
from benchmark.exceptions import MissingDataError
from benchmark.factors import FACTORS
from benchmark.graphs import GraphSpec
from benchmark.metrics import METRIC_NAMES

logger = logging.getLogger(__name__)


def _ok(frame: pd.DataFrame) -> pd.DataFrame:
    return frame[frame["status"] == "ok"] if "status" in frame else frame


def ranking_table(records: Any) -> pd.DataFrame:
    """Models by mean DOS (descending, ties by name) with metric ranks."""
    frame = records_frame(records)
    if frame.empty:
        raise MissingDataError("Cannot rank an empty record set.")
    failures = failure_rates(frame).set_index("model")
    scored = _ok(frame).copy()
    numeric = ["dos", *METRIC_NAMES]
    scored[numeric] = scored[numeric].apply(pd.to_numeric, errors="coerce")
    table = (
        scored.groupby("model")[["dos", *METRIC_NAMES]]
        .mean()
        .rename(columns={"dos": "mean_dos"})
        .reindex(failures.index)
    )
    table["runs"] = failures["runs"]
    table["failure_rate"] = failures["failure_rate"]
    table = table.reset_index()
    table = table.sort_values(
        ["mean_dos", "model"], ascending=[False, True], na_position="last"
    )
    table["dos_rank"] = np.arange(1, len(table) + 1)
    for name, objective in zip(METRIC_NAMES, METRIC_OBJECTIVES):
        table[f"{name}_rank"] = (
            table[name]
            .rank(method="min", ascending=objective is Objective.MIN)
            .astype("Int64")
        )
    return table.reset_index(drop=True)


def rank_correlations(ranking: pd.DataFrame) -> pd.DataFrame:
    """Spearman correlation of the DOS ranking with each metric ranking."""
    rows = []
    for name in METRIC_NAMES:
        pair = ranking[["dos_rank", f"{name}_rank"]].dropna()
        if len(pair) < 2:
            rho = np.nan
        else:
            rho = spearmanr(pair["dos_rank"], pair[f"{name}_rank"])[0]
        rows.append({"metric": name, "spearman": float(rho)})
    return pd.DataFrame(rows)


def failure_rates(records: Any) -> pd.DataFrame:
    frame = records_frame(records)
    status = frame.get("status", pd.Series("ok", index=frame.index))
    grouped = status.ne("ok").groupby(frame["model"])
    return pd.DataFrame(
        {
            "runs": grouped.size(),
            "failed": grouped.sum().astype(int),
            "failure_rate": grouped.mean(),
        }
    ).reset_index()


def sensitivity_table(
    records: Any, factors: Sequence[str] = FACTORS
) -> pd.DataFrame:
    """Delta-sum distribution summary per factor with at least two levels."""
    frame = records_frame(records)
    rows = []
    for factor in factors:
        if factor not in frame or frame[factor].nunique() < 2:
            continue
        try:
            result = factor_sensitivity(frame, factor)
        except MissingDataError as exc:
            logger.warning("No sensitivity for %s: %s", factor, exc)
            continue
        for model, deltas in result.table.groupby("model")["delta_sum"]:
            rows.append(
                {
                    "factor": factor,
                    "baseline": result.baseline,
                    "model": model,
                    "groups": int(deltas.size),
                    "skipped_groups": len(
                        [g for g in result.skipped if g.get("model") == model]
                    ),
                    "mean_delta_sum": float(deltas.mean()),
                    "median_delta_sum": float(deltas.median()),
                    "max_delta_sum": float(deltas.max()),
                }
            )
    return pd.DataFrame(rows)


def conditional_tables(
    records: Any, factors: Sequence[str] = FACTORS
) -> pd.DataFrame:
    """Long-format two-way mean DOS for every pair of varying factors."""
    frame = records_frame(records)
    varying = [f for f in factors if f in frame and frame[f].nunique() > 1]
    parts = []
    for factor_a, factor_b in itertools.combinations(varying, 2):
        cells = conditional_means(frame, factor_a, factor_b)
        parts.append(
            cells.rename(columns={factor_a: "level_a", factor_b: "level_b"})
            .assign(factor_a=factor_a, factor_b=factor_b)
        )
    columns = [
        "factor_a", "factor_b", "level_a", "level_b", "mean_dos", "count"
    ]
    if not parts:
        return pd.DataFrame(columns=columns)
    return pd.concat(parts, ignore_index=True)[columns]


def scale_rankings(records: Any) -> pd.DataFrame:
    """Rankings on original and standardized data and each model's shift."""
    frame = records_frame(records)
    per_scale = []
    for scale, subset in frame.groupby("scale"):
        ranking = ranking_table(subset)[["model", "mean_dos", "dos_rank"]]
        per_scale.append(
            ranking.rename(
                columns={
                    "mean_dos": f"mean_dos_{scale}",
                    "dos_rank": f"rank_{scale}",
                }
            ).set_index("model")
        )
    if not per_scale:
        return pd.DataFrame()
    table = pd.concat(per_scale, axis=1).reset_index()
    if {"rank_original", "rank_standardized"} <= set(table.columns):
        table["rank_shift"] = (
            table["rank_standardized"] - table["rank_original"]
        )
    return table


def edge_count_table(
    nodes: Iterable[int],
    connectivities: Iterable[float],
    draws: int = 100,
    seed: int = 0,
) -> pd.DataFrame:
    """Mean sampled edge counts of ER graphs and their matched SF graphs."""
    rng = np.random.default_rng(seed)
    rows = []
    for d, p in itertools.product(nodes, connectivities):
        er_spec = GraphSpec.from_connectivity(d, "ER", p)
        sf_spec = GraphSpec.from_connectivity(d, "SF", p)
        er_edges = [er_spec.sample(rng).n_edges for _ in range(draws)]
        sf_edges = [sf_spec.sample(rng).n_edges for _ in range(draws)]
        rows.append(
            {
                "nodes": d,
                "connectivity": p,
                "sf_k": sf_spec.k,
                "er_expected": p * d * (d - 1) / 2,
                "er_mean": float(np.mean(er_edges)),
                "sf_mean": float(np.mean(sf_edges)),
            }
        )
    return pd.DataFrame(rows)


@dataclass
class ReportBundle:
    tables: dict[str, pd.DataFrame] = field(default_factory=dict)

    def write(self, out_dir: Path | str) -> dict[str, Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = {}
        for name, table in self.tables.items():
            paths[name] = out_dir / f"{name}.csv"
            table.to_csv(paths[name], index=False)
            logger.info("Wrote %s (%d rows)", paths[name], len(table))
        return paths


def report(records: Any) -> ReportBundle:
    frame = records_frame(records)
    ranking = ranking_table(frame)
    return ReportBundle(
        {
            "ranking": ranking,
            "rank_correlations": rank_correlations(ranking),
            "failures": failure_rates(frame),
            "sensitivity": sensitivity_table(frame),
            "conditional_means": conditional_tables(frame),
            "scale_rankings": scale_rankings(frame),
            "runs": frame.drop(columns=["diagnostics"], errors="ignore"),
        }
    )
