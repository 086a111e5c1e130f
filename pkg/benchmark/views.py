from __future__ import annotations

from typing import Type

from django.db.models import QuerySet
from rest_framework import serializers, viewsets
from rest_framework.response import Response

from benchmark.exceptions import MissingDataError
from benchmark.models import RunRecord
from benchmark.reports import ranking_table
from benchmark.serializers import (
    RankingSerializer,
    RunRecordListSerializer,
    RunRecordSerializer,
)


def _parse_int_list(value: str) -> list[int]:
    result = []
    for part in value.split(","):
        part = part.strip()
        if part.isdigit():
            result.append(int(part))
    return result


class RunRecordViewSet(viewsets.ReadOnlyModelViewSet):
    queryset = RunRecord.objects.all()

    def get_queryset(self) -> QuerySet[RunRecord]:
        qs = super().get_queryset()

        for param in ("model", "graph_type", "scale", "status"):
            value = self.request.query_params.get(param)
            if value:
                qs = qs.filter(**{param: value})

        nodes = self.request.query_params.get("nodes")
        if nodes:
            node_counts = _parse_int_list(nodes)
            if node_counts:
                qs = qs.filter(nodes__in=node_counts)

        return qs

    def get_serializer_class(self) -> Type[serializers.Serializer]:
        if self.action == "list":
            return RunRecordListSerializer
        return RunRecordSerializer


class RankingViewSet(viewsets.ViewSet):
    """Models ranked by mean DOS over the stored records."""

    def list(self, request):
        qs = RunRecord.objects.all()
        scale = request.query_params.get("scale")
        if scale:
            qs = qs.filter(scale=scale)

        try:
            table = ranking_table(list(qs.values()))
        except MissingDataError:
            return Response([])

        rows = table.astype(object).where(table.notna(), None)
        serializer = RankingSerializer(rows.to_dict("records"), many=True)
        return Response(serializer.data)
