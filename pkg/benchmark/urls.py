from django.urls import include, path
from rest_framework.routers import DefaultRouter

from benchmark.views import RankingViewSet, RunRecordViewSet

app_name = "benchmark"

router = DefaultRouter()
router.register("records", RunRecordViewSet)
router.register("rankings", RankingViewSet, basename="rankings")

urlpatterns = [
    path("", include(router.urls)),
]
