import json
from pathlib import Path

from benchmark.dos import dos_single
from benchmark.exceptions import UndefinedValueError
from benchmark.management.base import BenchmarkCommand
from benchmark.metrics import evaluate, r2_sortability, varsortability
from benchmark.persistence import read_dataset, read_graph_csv


class Command(BenchmarkCommand):
    help = "Score an estimated graph against the true graph."

    def add_arguments(self, parser):
        parser.add_argument("truth", type=Path)
        parser.add_argument("estimate", type=Path)
        parser.add_argument(
            "--dataset",
            type=Path,
            required=True,
            help="Dataset CSV; fixes the node count and the sortability "
            "descriptors.",
        )
        parser.add_argument("--out", type=Path)

    def run(self, *args, **options):
        dataset = read_dataset(options["dataset"])
        truth, _ = read_graph_csv(options["truth"], dataset.d)
        estimate, _ = read_graph_csv(options["estimate"], dataset.d)

        evaluation = evaluate(truth, estimate)
        record = {
            **evaluation.as_dict(),
            "dos": dos_single(evaluation.metrics).value,
        }
        for name, function in (
            ("varsortability", varsortability),
            ("r2_sortability", r2_sortability),
        ):
            try:
                record[name] = function(truth, dataset)
            except UndefinedValueError:
                record[name] = None

        text = json.dumps(record, indent=2, sort_keys=True)
        if options["out"]:
            options["out"].parent.mkdir(parents=True, exist_ok=True)
            options["out"].write_text(text + "\n")
        self.stdout.write(text)
