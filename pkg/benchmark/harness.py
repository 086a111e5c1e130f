from __future__ import annotations

import itertools
import logging
import time
import zlib
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
from joblib import Parallel, delayed

from benchmark.discovery import (
    LEARNERS,
    LearnerContext,
    NoTearsParams,
    run_learner,
)
from benchmark.dos import dos_single
from benchmark.exceptions import (
    BenchmarkError,
    InvalidConfigError,
    UndefinedValueError,
)
from benchmark.factors import FACTORS, FULL_DOMAINS, GENERATING_FACTORS
from benchmark.graphs import GraphSpec
from benchmark.metrics import evaluate, r2_sortability, varsortability
from benchmark.persistence import RecordStore
from benchmark.simulation import (
    Dataset,
    Provenance,
    Scale,
    SimConfig,
    Simulation,
    derive_variant,
    simulate,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
MASK64 = (1 << 64) - 1
STREAM_SUBSAMPLE = 1
STREAM_LEARNER = 2

# learners in the complete benchmark roster
FULL_STUDY_MODELS = 14
DESK_MODELS = (
    "var_sortnregress",
    "r2_sortnregress",
    "notears",
    "empty",
    "random",
)


@dataclass(frozen=True)
class ExperimentGrid:
    sample_sizes: tuple[int, ...] = FULL_DOMAINS["sample_size"]
    nodes: tuple[int, ...] = FULL_DOMAINS["nodes"]
    graph_types: tuple[str, ...] = FULL_DOMAINS["graph_type"]
    connectivities: tuple[float, ...] = FULL_DOMAINS["connectivity"]
    relu_fractions: tuple[float, ...] = FULL_DOMAINS["relu_fraction"]
    w_uppers: tuple[float, ...] = FULL_DOMAINS["w_upper"]
    scales: tuple[str, ...] = FULL_DOMAINS["scale"]
    replicates: int = 10
    master_seed: int = 0
    models: tuple[str, ...] = DESK_MODELS

    def __post_init__(self) -> None:
        for name, domain in self.domains().items():
            if not domain:
                raise InvalidConfigError(f"Factor {name!r} has no levels.")
        if self.replicates < 1:
            raise InvalidConfigError("At least one replicate is required.")

    @classmethod
    def preset(cls, name: str, **overrides: Any) -> ExperimentGrid:
        if name == "full":
            return cls(**overrides)
        if name == "desk":
            return cls(**{"nodes": (10, 20), "replicates": 3, **overrides})
        raise InvalidConfigError(f"Unknown preset {name!r}.")

    def domains(self) -> dict[str, tuple]:
        return {
            "sample_size": tuple(self.sample_sizes),
            "nodes": tuple(self.nodes),
            "graph_type": tuple(self.graph_types),
            "connectivity": tuple(self.connectivities),
            "relu_fraction": tuple(self.relu_fractions),
            "w_upper": tuple(self.w_uppers),
            "scale": tuple(self.scales),
        }


@dataclass(frozen=True)
class Cell:
    cell_id: int
    sample_size: int
    nodes: int
    graph_type: str
    connectivity: float
    relu_fraction: float
    w_upper: float
    scale: str

    @property
    def design_key(self) -> str:
        """Identity of the base draw shared by the cell's data variants."""
        return "|".join(
            f"{name}={getattr(self, name)}" for name in GENERATING_FACTORS
        )

    def factors(self) -> dict[str, Any]:
        return {name: getattr(self, name) for name in FACTORS}

    def sim_config(self, seed: int) -> SimConfig:
        return SimConfig(
            graph=GraphSpec.from_connectivity(
                self.nodes, self.graph_type, self.connectivity
            ),
            relu_fraction=self.relu_fraction,
            w_upper=self.w_upper,
            sample_size=self.sample_size,
            scale=Scale(self.scale),
            seed=seed,
        )


def enumerate_grid(grid: ExperimentGrid) -> list[Cell]:
    """Cells in lexicographic order of the factor domains."""
    domains = grid.domains()
    return [
        Cell(cell_id, **dict(zip(FACTORS, levels)))
        for cell_id, levels in enumerate(
            itertools.product(*(domains[name] for name in FACTORS))
        )
    ]


def count_runs(grid: ExperimentGrid, n_models: int | None = None) -> int:
    n_models = len(grid.models) if n_models is None else n_models
    return len(enumerate_grid(grid)) * grid.replicates * n_models


def splitmix64(value: int) -> int:
    value = (value + 0x9E3779B97F4A7C15) & MASK64
    value = ((value ^ (value >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    value = ((value ^ (value >> 27)) * 0x94D049BB133111EB) & MASK64
    return value ^ (value >> 31)


def instance_seed(master_seed: int, design_key: str, replicate: int) -> int:
    """Chain splitmix64 over master seed, design key checksum, replicate."""
    state = splitmix64(master_seed & MASK64)
    state = splitmix64(state ^ zlib.crc32(design_key.encode("utf-8")))
    return splitmix64(state ^ replicate)


def _stream(seed: int, *tags: int) -> np.random.Generator:
    return np.random.default_rng([seed, *tags])


@dataclass
class RunRecord:
    cell_id: int
    design_key: str
    replicate: int
    model: str
    seed: int
    sample_size: int
    nodes: int
    graph_type: str
    connectivity: float
    relu_fraction: float
    w_upper: float
    scale: str
    status: str = "ok"
    error: str = ""
    tpr: float | None = None
    fpr: float | None = None
    nshd: float | None = None
    f1: float | None = None
    ncod: float | None = None
    nsid: float | None = None
    shd: int | None = None
    cod: int | None = None
    sid: int | None = None
    tp_dir: int | None = None
    fp_skel: int | None = None
    missing: int | None = None
    reversed: int | None = None
    t_true: int | None = None
    e_est: int | None = None
    dos: float | None = None
    varsortability: float | None = None
    r2_sortability: float | None = None
    wall_clock: float = 0.0
    diagnostics: dict[str, float] = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


RECORD_FIELDS = frozenset(item.name for item in fields(RunRecord))


def _descriptor(function, simulation: Simulation, dataset: Dataset):
    try:
        return function(simulation.dag, dataset)
    except UndefinedValueError:
        return None
    except (BenchmarkError, np.linalg.LinAlgError) as exc:
        logger.warning("Skipping %s: %s", function.__name__, exc)
        return None


def simulate_cell(
    cell: Cell, replicate: int, master_seed: int
) -> tuple[int, Simulation, Dataset]:
    """Instance seed, base draw and the cell's (sample size, scale) variant."""
    seed = instance_seed(master_seed, cell.design_key, replicate)
    config = cell.sim_config(seed)
    provenance = Provenance(master_seed, cell.design_key, replicate)
    simulation = simulate(config, np.random.default_rng(seed), provenance)
    dataset = derive_variant(
        simulation.dataset,
        cell.sample_size,
        cell.scale,
        _stream(seed, STREAM_SUBSAMPLE),
    )
    return seed, simulation, dataset


def run_cell(
    cell: Cell,
    replicate: int,
    models: Sequence[str],
    master_seed: int,
    notears: NoTearsParams | None = None,
) -> list[RunRecord]:
    """Simulate one (cell, replicate), fit every model and score it."""
    seed, simulation, dataset = simulate_cell(cell, replicate, master_seed)
    descriptors = {
        "varsortability": _descriptor(varsortability, simulation, dataset),
        "r2_sortability": _descriptor(r2_sortability, simulation, dataset),
    }

    records = []
    for model in models:
        record = RunRecord(
            cell_id=cell.cell_id,
            design_key=cell.design_key,
            replicate=replicate,
            model=model,
            seed=seed,
            **cell.factors(),
            **descriptors,
        )
        context = LearnerContext(
            rng=_stream(seed, STREAM_LEARNER, zlib.crc32(model.encode())),
            truth=simulation.dag,
            connectivity=cell.connectivity,
            notears=notears or NoTearsParams(),
        )
        started = time.perf_counter()
        try:
            result = run_learner(model, dataset, context)
            evaluation = evaluate(simulation.dag, result.graph)
        except Exception as exc:
            logger.warning(
                "Model %s failed on cell %d replicate %d: %s",
                model, cell.cell_id, replicate, exc,
            )
            record.status = "failed"
            record.error = f"{type(exc).__name__}: {exc}"
        else:
            for name, value in evaluation.as_dict().items():
                if name in RECORD_FIELDS:
                    setattr(record, name, value)
            record.dos = dos_single(evaluation.metrics).value
            record.diagnostics = {
                name: float(value)
                for name, value in result.diagnostics.items()
            }
        record.wall_clock = time.perf_counter() - started
        records.append(record)
    return records


def work_items(
    grid: ExperimentGrid, completed: set[tuple[int, int, str]] = frozenset()
) -> list[tuple[Cell, int, tuple[str, ...]]]:
    """(cell, replicate, models still to run) for every unfinished unit."""
    items = []
    for cell in enumerate_grid(grid):
        for replicate in range(grid.replicates):
            pending = tuple(
                model for model in grid.models
                if (cell.cell_id, replicate, model) not in completed
            )
            if pending:
                items.append((cell, replicate, pending))
    return items


def run_grid(
    grid: ExperimentGrid,
    records_path: Path | str,
    jobs: int = 1,
    notears: NoTearsParams | None = None,
) -> int:
    """Run every unfinished unit of the grid and append its records.

    Workers only compute; this process is the single writer. Results come
    back in submission order, so the file is identical for any ``jobs``.
    """
    unknown = set(grid.models) - set(LEARNERS)
    if unknown:
        raise InvalidConfigError(f"Unknown models: {sorted(unknown)}.")
    store = RecordStore(records_path)
    items = work_items(grid, store.completed_keys())
    logger.info(
        "Running %d work items (%d models) with %d jobs",
        len(items), len(grid.models), jobs,
    )
    results: Iterable[list[RunRecord]] = Parallel(
        n_jobs=jobs, return_as="generator"
    )(
        delayed(run_cell)(cell, replicate, models, grid.master_seed, notears)
        for cell, replicate, models in items
    )
    written = 0
    for records in results:
        written += store.append(record.as_dict() for record in records)
    logger.info("Wrote %d records to %s", written, store.path)
    return written
