"""
WSGI config for the causal_bench project.

Serves the read-only benchmark records API.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "causal_bench.settings")

application = get_wsgi_application()
