from django.contrib import admin
from django.urls import path, include

urlpatterns = [
    path("admin/", admin.site.urls),
    path("api/benchmark/", include("benchmark.urls", namespace="benchmark")),
    path("__debug__/", include("debug_toolbar.urls")),
]
