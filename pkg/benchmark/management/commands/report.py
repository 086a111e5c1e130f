from pathlib import Path

from django.conf import settings
from django.core.management.base import CommandError

from benchmark.management.base import BenchmarkCommand
from benchmark.persistence import RecordStore
from benchmark.reports import edge_count_table, report


class Command(BenchmarkCommand):
    help = "Build the ranking and sensitivity CSV bundle from run records."

    def add_arguments(self, parser):
        parser.add_argument("records", type=Path)
        parser.add_argument(
            "--out",
            type=Path,
            default=settings.BENCHMARK["OUTPUT_DIR"] / "report",
        )
        parser.add_argument(
            "--edge-draws",
            type=int,
            default=0,
            help="Also tabulate ER/SF edge counts with this many draws.",
        )

    def run(self, *args, **options):
        records = list(RecordStore(options["records"]))
        if not records:
            raise CommandError(f"No records in {options['records']}.")
        bundle = report(records)
        if options["edge_draws"]:
            frame = bundle.tables["runs"]
            bundle.tables["edge_counts"] = edge_count_table(
                sorted(frame["nodes"].unique()),
                sorted(frame["connectivity"].unique()),
                draws=options["edge_draws"],
            )
        paths = bundle.write(options["out"])

        ranking = bundle.tables["ranking"]
        for row in ranking.itertuples(index=False):
            self.stdout.write(
                f"{row.dos_rank:>3}  {row.model:<20} {row.mean_dos:.4f}"
            )
        self.stdout.write(
            self.style.SUCCESS(
                f"Wrote {len(paths)} tables to {options['out']}"
            )
        )
