from __future__ import annotations

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from benchmark.discovery import NoTearsParams
from benchmark.exceptions import BenchmarkError


class BenchmarkCommand(BaseCommand):
    """Runs ``run()`` and reports benchmark errors as command errors."""

    def handle(self, *args, **options):
        try:
            return self.run(*args, **options)
        except BenchmarkError as exc:
            raise CommandError(f"{type(exc).__name__}: {exc}") from exc
        except OSError as exc:
            raise CommandError(str(exc)) from exc

    def run(self, *args, **options):
        raise NotImplementedError

    @staticmethod
    def notears_params() -> NoTearsParams:
        return NoTearsParams(**settings.BENCHMARK["NOTEARS"])


def parse_models(value: str | None) -> tuple[str, ...] | None:
    if not value:
        return None
    return tuple(name.strip() for name in value.split(",") if name.strip())
