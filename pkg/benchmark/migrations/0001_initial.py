# Generated by Django 4.1 on 2026-10-17 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="RunRecord",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                ("cell_id", models.IntegerField()),
                ("design_key", models.CharField(max_length=255)),
                ("replicate", models.IntegerField()),
                ("model", models.CharField(max_length=64)),
                ("seed", models.CharField(max_length=32)),
                ("sample_size", models.IntegerField()),
                ("nodes", models.IntegerField()),
                (
                    "graph_type",
                    models.CharField(
                        choices=[("ER", "ER"), ("SF", "SF")], max_length=2
                    ),
                ),
                ("connectivity", models.FloatField()),
                ("relu_fraction", models.FloatField()),
                ("w_upper", models.FloatField()),
                (
                    "scale",
                    models.CharField(
                        choices=[
                            ("original", "original"),
                            ("standardized", "standardized"),
                        ],
                        max_length=16,
                    ),
                ),
                (
                    "status",
                    models.CharField(
                        choices=[("ok", "Ok"), ("failed", "Failed")],
                        default="ok",
                        max_length=8,
                    ),
                ),
                ("error", models.TextField(blank=True, default="")),
                ("tpr", models.FloatField(blank=True, null=True)),
                ("fpr", models.FloatField(blank=True, null=True)),
                ("nshd", models.FloatField(blank=True, null=True)),
                ("f1", models.FloatField(blank=True, null=True)),
                ("ncod", models.FloatField(blank=True, null=True)),
                ("nsid", models.FloatField(blank=True, null=True)),
                ("dos", models.FloatField(blank=True, null=True)),
                ("shd", models.IntegerField(blank=True, null=True)),
                ("cod", models.IntegerField(blank=True, null=True)),
                ("sid", models.IntegerField(blank=True, null=True)),
                ("tp_dir", models.IntegerField(blank=True, null=True)),
                ("fp_skel", models.IntegerField(blank=True, null=True)),
                ("missing", models.IntegerField(blank=True, null=True)),
                ("reversed", models.IntegerField(blank=True, null=True)),
                ("t_true", models.IntegerField(blank=True, null=True)),
                ("e_est", models.IntegerField(blank=True, null=True)),
                (
                    "varsortability",
                    models.FloatField(blank=True, null=True),
                ),
                (
                    "r2_sortability",
                    models.FloatField(blank=True, null=True),
                ),
                ("wall_clock", models.FloatField(default=0.0)),
                ("diagnostics", models.JSONField(blank=True, default=dict)),
                ("schema_version", models.IntegerField(default=1)),
            ],
            options={
                "ordering": ["cell_id", "replicate", "model"],
            },
        ),
        migrations.AddConstraint(
            model_name="runrecord",
            constraint=models.UniqueConstraint(
                fields=("cell_id", "replicate", "model"),
                name="unique_run_per_cell_replicate_model",
            ),
        ),
    ]
