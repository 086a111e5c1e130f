"""
ASGI config for the causal_bench project.

Serves the read-only benchmark records API.
"""

import os

from django.core.asgi import get_asgi_application

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "causal_bench.settings")

application = get_asgi_application()
