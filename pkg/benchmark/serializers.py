from __future__ import annotations

from typing import Any

from rest_framework import serializers

from benchmark.discovery import LEARNERS
from benchmark.exceptions import InvalidConfigError
from benchmark.factors import FULL_DOMAINS
from benchmark.harness import ExperimentGrid
from benchmark.metrics import METRIC_NAMES
from benchmark.models import RunRecord

# ExperimentGrid field -> factor whose domain it draws from
GRID_DOMAIN_FIELDS = {
    "sample_sizes": "sample_size",
    "nodes": "nodes",
    "graph_types": "graph_type",
    "connectivities": "connectivity",
    "relu_fractions": "relu_fraction",
    "w_uppers": "w_upper",
    "scales": "scale",
}


class RunRecordListSerializer(serializers.ModelSerializer):
    class Meta:
        model = RunRecord
        fields = (
            "id",
            "cell_id",
            "replicate",
            "model",
            "sample_size",
            "nodes",
            "graph_type",
            "connectivity",
            "relu_fraction",
            "w_upper",
            "scale",
            "status",
            *METRIC_NAMES,
            "dos",
        )


class RunRecordSerializer(serializers.ModelSerializer):
    """Full record, used for detail views and for importing JSON lines."""

    class Meta:
        model = RunRecord
        fields = "__all__"

    def validate(self, attrs: dict[str, Any]) -> dict[str, Any]:
        for name in (*METRIC_NAMES, "dos"):
            value = attrs.get(name)
            if value is not None and not (0.0 <= value <= 1.0):
                raise serializers.ValidationError(
                    {name: f"{name} must be in range [0, 1]."}
                )
        if attrs.get("status") == RunRecord.Status.FAILED and attrs.get(
            "dos"
        ) is not None:
            raise serializers.ValidationError(
                {"status": "Failed run must not carry scores."}
            )
        return attrs


class RankingSerializer(serializers.Serializer):
    model = serializers.CharField()
    dos_rank = serializers.IntegerField()
    mean_dos = serializers.FloatField(allow_null=True)
    runs = serializers.IntegerField()
    failure_rate = serializers.FloatField()
    tpr = serializers.FloatField(allow_null=True)
    fpr = serializers.FloatField(allow_null=True)
    nshd = serializers.FloatField(allow_null=True)
    f1 = serializers.FloatField(allow_null=True)
    ncod = serializers.FloatField(allow_null=True)
    nsid = serializers.FloatField(allow_null=True)


class ExperimentGridSerializer(serializers.Serializer):
    """Validates a JSON experiment config; absent keys come from a preset.

    The preset name is read from ``context["preset"]`` (default ``desk``);
    ``context["defaults"]`` is applied beneath the validated values.
    """

    sample_sizes = serializers.ListField(
        child=serializers.IntegerField(), allow_empty=False, required=False
    )
    nodes = serializers.ListField(
        child=serializers.IntegerField(), allow_empty=False, required=False
    )
    graph_types = serializers.ListField(
        child=serializers.CharField(), allow_empty=False, required=False
    )
    connectivities = serializers.ListField(
        child=serializers.FloatField(), allow_empty=False, required=False
    )
    relu_fractions = serializers.ListField(
        child=serializers.FloatField(), allow_empty=False, required=False
    )
    w_uppers = serializers.ListField(
        child=serializers.FloatField(), allow_empty=False, required=False
    )
    scales = serializers.ListField(
        child=serializers.CharField(), allow_empty=False, required=False
    )
    replicates = serializers.IntegerField(min_value=1, required=False)
    master_seed = serializers.IntegerField(min_value=0, required=False)
    models = serializers.ListField(
        child=serializers.ChoiceField(choices=sorted(LEARNERS)),
        allow_empty=False,
        required=False,
    )

    def validate(self, attrs: dict[str, Any]) -> dict[str, Any]:
        unknown = set(self.initial_data) - set(self.fields)
        if unknown:
            raise serializers.ValidationError(
                {name: "Unknown config key." for name in sorted(unknown)}
            )
        for field_name, factor in GRID_DOMAIN_FIELDS.items():
            levels = attrs.get(field_name)
            if levels is None:
                continue
            outside = [
                level for level in levels if level not in FULL_DOMAINS[factor]
            ]
            if outside:
                raise serializers.ValidationError(
                    {
                        field_name: f"Levels {outside} are not in "
                        f"{list(FULL_DOMAINS[factor])}."
                    }
                )
            if len(set(levels)) != len(levels):
                raise serializers.ValidationError(
                    {field_name: "Levels must not repeat."}
                )
        return attrs

    def create(self, validated_data: dict[str, Any]) -> ExperimentGrid:
        preset = self.context.get("preset", "desk")
        merged = {**self.context.get("defaults", {}), **validated_data}
        overrides = {
            name: tuple(value) if isinstance(value, list) else value
            for name, value in merged.items()
        }
        try:
            return ExperimentGrid.preset(preset, **overrides)
        except InvalidConfigError as exc:
            raise serializers.ValidationError(str(exc)) from exc
