from django.apps import AppConfig


class TableDetectionConfig(AppConfig):
    name = "apps.table_detection"
    verbose_name = "Detecção de tabelas"
