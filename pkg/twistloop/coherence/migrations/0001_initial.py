# Generated by Django 5.2.3 on 2026-10-18 09:12

from django.db import migrations, models


class Migration(migrations.Migration):
    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="CoherenceRecord",
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
                ("datum", models.CharField(max_length=20)),
                ("mu", models.CharField(max_length=100)),
                ("y_nodes", models.CharField(max_length=100)),
                ("a", models.PositiveIntegerField()),
                ("h_y", models.BigIntegerField()),
                ("h", models.BigIntegerField()),
                ("equal", models.BooleanField()),
                ("proven", models.BooleanField(default=False)),
                (
                    "status",
                    models.CharField(
                        choices=[
                            ("equal", "Equal"),
                            ("unequal", "Unequal"),
                            ("open", "Open"),
                        ],
                        max_length=10,
                    ),
                ),
                ("elapsed", models.FloatField(default=0.0)),
                ("created_at", models.DateTimeField(auto_now_add=True)),
            ],
            options={
                "ordering": ["created_at", "id"],
            },
        ),
    ]
