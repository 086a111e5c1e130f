from pathlib import Path

from django.conf import settings
from django.core.management.base import CommandError
from django.db import transaction

from benchmark.management.base import BenchmarkCommand
from benchmark.models import RunRecord
from benchmark.persistence import RecordStore
from benchmark.serializers import RunRecordSerializer


class Command(BenchmarkCommand):
    help = "Import a JSON-lines records file into the database."

    def add_arguments(self, parser):
        parser.add_argument("records", type=Path)

    @transaction.atomic
    def run(self, *args, **options):
        expected_version = settings.BENCHMARK["RECORD_SCHEMA_VERSION"]
        existing = set(
            RunRecord.objects.values_list("cell_id", "replicate", "model")
        )
        created = skipped = 0
        for number, row in enumerate(RecordStore(options["records"]), 1):
            if row.get("schema_version") != expected_version:
                raise CommandError(
                    f"Line {number}: schema version "
                    f"{row.get('schema_version')} != {expected_version}."
                )
            key = (row.get("cell_id"), row.get("replicate"), row.get("model"))
            if key in existing:
                skipped += 1
                continue
            serializer = RunRecordSerializer(data=row)
            if not serializer.is_valid():
                raise CommandError(f"Line {number}: {serializer.errors}")
            serializer.save()
            existing.add(key)
            created += 1

        self.stdout.write(
            self.style.SUCCESS(
                f"Imported {created} records, skipped {skipped} existing"
            )
        )
