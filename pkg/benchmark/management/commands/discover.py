import zlib
from pathlib import Path

import numpy as np
from django.conf import settings

from benchmark.discovery import LEARNERS, LearnerContext, run_learner
from benchmark.harness import STREAM_LEARNER
from benchmark.management.base import BenchmarkCommand
from benchmark.persistence import read_dataset, read_graph_csv, write_graph_csv


class Command(BenchmarkCommand):
    help = "Fit one structure learner to a dataset CSV."

    def add_arguments(self, parser):
        parser.add_argument("dataset", type=Path)
        parser.add_argument(
            "--model", choices=sorted(LEARNERS), default="var_sortnregress"
        )
        parser.add_argument(
            "--seed", type=int, default=settings.BENCHMARK["MASTER_SEED"]
        )
        parser.add_argument(
            "--connectivity",
            type=float,
            default=0.2,
            help="Edge probability used by the random baseline.",
        )
        parser.add_argument(
            "--truth",
            type=Path,
            help="True graph CSV, needed by the truth oracle.",
        )
        parser.add_argument("--out", type=Path)

    def run(self, *args, **options):
        dataset = read_dataset(options["dataset"])
        truth = None
        if options["truth"]:
            truth, _ = read_graph_csv(options["truth"], dataset.d)
        model = options["model"]
        context = LearnerContext(
            rng=np.random.default_rng(
                [options["seed"], STREAM_LEARNER, zlib.crc32(model.encode())]
            ),
            truth=truth,
            connectivity=options["connectivity"],
            notears=self.notears_params(),
        )
        result = run_learner(model, dataset, context)

        out = options["out"] or options["dataset"].with_name(
            f"estimate_{model}.csv"
        )
        out.parent.mkdir(parents=True, exist_ok=True)
        write_graph_csv(result.weights.W * result.graph.adj, out)
        self.stdout.write(
            self.style.SUCCESS(
                f"{model}: {result.graph.n_edges} edges written to {out}"
            )
        )
