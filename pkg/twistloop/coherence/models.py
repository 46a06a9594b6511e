from django.db import models


class CoherenceRecord(models.Model):
    """보관된 정합성 비교 결과"""

    class Status(models.TextChoices):
        EQUAL = "equal", "Equal"
        UNEQUAL = "unequal", "Unequal"
        OPEN = "open", "Open"

    datum = models.CharField(max_length=20)
    mu = models.CharField(max_length=100)  # 쉼표로 구분한 여가중치
    y_nodes = models.CharField(max_length=100)
    a = models.PositiveIntegerField()
    h_y = models.BigIntegerField()
    h = models.BigIntegerField()
    equal = models.BooleanField()
    proven = models.BooleanField(default=False)
    status = models.CharField(max_length=10, choices=Status.choices)
    elapsed = models.FloatField(default=0.0)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ["created_at", "id"]

    def __str__(self):
        return f"{self.datum} mu=({self.mu}) Y={{{self.y_nodes}}} a={self.a}: {self.status}"
