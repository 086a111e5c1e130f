from pathlib import Path

from django.conf import settings

from benchmark.factors import DEFAULT_BASELINES, FULL_DOMAINS
from benchmark.harness import Cell, simulate_cell
from benchmark.management.base import BenchmarkCommand
from benchmark.persistence import (
    write_adjacency_csv,
    write_dataset,
    write_graph_csv,
)


class Command(BenchmarkCommand):
    help = "Simulate one grid cell and write its dataset and true graph."

    def add_arguments(self, parser):
        parser.add_argument(
            "--nodes", type=int, default=DEFAULT_BASELINES["nodes"]
        )
        parser.add_argument(
            "--graph-type",
            choices=FULL_DOMAINS["graph_type"],
            default=DEFAULT_BASELINES["graph_type"],
        )
        parser.add_argument(
            "--connectivity",
            type=float,
            default=DEFAULT_BASELINES["connectivity"],
        )
        parser.add_argument(
            "--relu-fraction",
            type=float,
            default=DEFAULT_BASELINES["relu_fraction"],
        )
        parser.add_argument(
            "--w-upper", type=float, default=DEFAULT_BASELINES["w_upper"]
        )
        parser.add_argument(
            "--sample-size",
            type=int,
            choices=FULL_DOMAINS["sample_size"],
            default=DEFAULT_BASELINES["sample_size"],
        )
        parser.add_argument(
            "--scale",
            choices=FULL_DOMAINS["scale"],
            default=DEFAULT_BASELINES["scale"],
        )
        parser.add_argument("--replicate", type=int, default=0)
        parser.add_argument(
            "--seed", type=int, default=settings.BENCHMARK["MASTER_SEED"]
        )
        parser.add_argument(
            "--out", type=Path, default=settings.BENCHMARK["OUTPUT_DIR"]
        )

    def run(self, *args, **options):
        cell = Cell(
            cell_id=0,
            sample_size=options["sample_size"],
            nodes=options["nodes"],
            graph_type=options["graph_type"],
            connectivity=options["connectivity"],
            relu_fraction=options["relu_fraction"],
            w_upper=options["w_upper"],
            scale=options["scale"],
        )
        seed, simulation, dataset = simulate_cell(
            cell, options["replicate"], options["seed"]
        )

        out_dir = options["out"]
        out_dir.mkdir(parents=True, exist_ok=True)
        truth_path = write_graph_csv(
            simulation.weights.W, out_dir / "truth.csv"
        )
        write_adjacency_csv(simulation.dag, out_dir / "truth_adjacency.csv")
        data_path = write_dataset(
            dataset,
            out_dir / "dataset.csv",
            metadata={
                "seed": str(seed),
                "sim_config": cell.sim_config(seed).as_dict(),
                "factors": cell.factors(),
                "truth": truth_path.name,
                "relu_nodes": simulation.mechanisms.relu_nodes,
            },
        )
        self.stdout.write(
            self.style.SUCCESS(
                f"Wrote {data_path} ({dataset.n} x {dataset.d}) and "
                f"{truth_path} ({simulation.dag.n_edges} edges)"
            )
        )
