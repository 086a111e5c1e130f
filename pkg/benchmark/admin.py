from django.contrib import admin

from .models import RunRecord


@admin.register(RunRecord)
class RunRecordAdmin(admin.ModelAdmin):
    list_display = ("cell_id", "replicate", "model", "status", "dos")
    list_filter = ("model", "status", "graph_type", "scale", "nodes")
    search_fields = ("design_key", "model")
