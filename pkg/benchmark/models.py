from django.core.exceptions import ValidationError
from django.db import models

from benchmark.factors import FULL_DOMAINS
from benchmark.metrics import METRIC_NAMES


class RunRecord(models.Model):
    class Status(models.TextChoices):
        OK = "ok"
        FAILED = "failed"

    cell_id = models.IntegerField()
    design_key = models.CharField(max_length=255)
    replicate = models.IntegerField()
    model = models.CharField(max_length=64)
    seed = models.CharField(max_length=32)

    sample_size = models.IntegerField()
    nodes = models.IntegerField()
    graph_type = models.CharField(
        max_length=2,
        choices=[(kind, kind) for kind in FULL_DOMAINS["graph_type"]],
    )
    connectivity = models.FloatField()
    relu_fraction = models.FloatField()
    w_upper = models.FloatField()
    scale = models.CharField(
        max_length=16,
        choices=[(scale, scale) for scale in FULL_DOMAINS["scale"]],
    )

    status = models.CharField(
        max_length=8, choices=Status.choices, default=Status.OK
    )
    error = models.TextField(blank=True, default="")

    tpr = models.FloatField(null=True, blank=True)
    fpr = models.FloatField(null=True, blank=True)
    nshd = models.FloatField(null=True, blank=True)
    f1 = models.FloatField(null=True, blank=True)
    ncod = models.FloatField(null=True, blank=True)
    nsid = models.FloatField(null=True, blank=True)
    dos = models.FloatField(null=True, blank=True)

    shd = models.IntegerField(null=True, blank=True)
    cod = models.IntegerField(null=True, blank=True)
    sid = models.IntegerField(null=True, blank=True)
    tp_dir = models.IntegerField(null=True, blank=True)
    fp_skel = models.IntegerField(null=True, blank=True)
    missing = models.IntegerField(null=True, blank=True)
    reversed = models.IntegerField(null=True, blank=True)
    t_true = models.IntegerField(null=True, blank=True)
    e_est = models.IntegerField(null=True, blank=True)

    varsortability = models.FloatField(null=True, blank=True)
    r2_sortability = models.FloatField(null=True, blank=True)
    wall_clock = models.FloatField(default=0.0)
    diagnostics = models.JSONField(default=dict, blank=True)
    schema_version = models.IntegerField(default=1)

    class Meta:
        ordering = ["cell_id", "replicate", "model"]
        constraints = [
            models.UniqueConstraint(
                fields=["cell_id", "replicate", "model"],
                name="unique_run_per_cell_replicate_model",
            )
        ]

    def clean(self):
        scores = {name: getattr(self, name) for name in (*METRIC_NAMES, "dos")}
        for name, value in scores.items():
            if value is not None and not (0.0 <= value <= 1.0):
                raise ValidationError(
                    {name: f"{name} must be in range [0, 1], got {value}"}
                )
        if self.status == self.Status.OK:
            missing = [name for name, value in scores.items() if value is None]
            if missing:
                raise ValidationError(
                    {"status": f"Successful run lacks scores: {missing}"}
                )
        elif any(value is not None for value in scores.values()):
            raise ValidationError(
                {"status": "Failed run must not carry scores."}
            )

    def save(
        self,
        force_insert=False,
        force_update=False,
        using=None,
        update_fields=None,
    ):
        self.full_clean()
        super(RunRecord, self).save(
            force_insert, force_update, using, update_fields
        )

    def __str__(self):
        return f"{self.model} on cell {self.cell_id} (rep {self.replicate})"
