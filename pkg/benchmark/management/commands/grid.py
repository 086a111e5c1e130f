import json
from pathlib import Path

from django.conf import settings
from django.core.management.base import CommandError

from benchmark.harness import count_runs, enumerate_grid, run_grid
from benchmark.management.base import BenchmarkCommand, parse_models
from benchmark.serializers import ExperimentGridSerializer


class Command(BenchmarkCommand):
    help = "Run every (cell, replicate, model) of an experiment grid."

    def add_arguments(self, parser):
        parser.add_argument("--config", type=Path)
        parser.add_argument(
            "--preset", choices=("desk", "full"), default="desk"
        )
        parser.add_argument(
            "--models", help="Comma separated learner names."
        )
        parser.add_argument("--seed", type=int)
        parser.add_argument(
            "--jobs", type=int, default=settings.BENCHMARK["JOBS"]
        )
        parser.add_argument(
            "--out", type=Path, default=settings.BENCHMARK["OUTPUT_DIR"]
        )
        parser.add_argument(
            "--dry-run",
            action="store_true",
            help="Only print the grid size.",
        )

    def run(self, *args, **options):
        config = {}
        if options["config"]:
            config = json.loads(options["config"].read_text())
        models = parse_models(options["models"])
        if models:
            config["models"] = list(models)
        if options["seed"] is not None:
            config["master_seed"] = options["seed"]

        defaults = {"master_seed": settings.BENCHMARK["MASTER_SEED"]}
        if options["preset"] == "full":
            defaults["replicates"] = settings.BENCHMARK["REPLICATES"]
        serializer = ExperimentGridSerializer(
            data=config,
            context={"preset": options["preset"], "defaults": defaults},
        )
        if not serializer.is_valid():
            raise CommandError(f"Invalid config: {serializer.errors}")
        grid = serializer.save()

        self.stdout.write(
            f"{len(enumerate_grid(grid))} cells x {grid.replicates} "
            f"replicates x {len(grid.models)} models = "
            f"{count_runs(grid)} runs"
        )
        if options["dry_run"]:
            return

        records_path = options["out"] / "records.jsonl"
        written = run_grid(
            grid,
            records_path,
            jobs=options["jobs"],
            notears=self.notears_params(),
        )
        self.stdout.write(
            self.style.SUCCESS(f"Appended {written} records to {records_path}")
        )
