import os

from celery import Celery

# Módulo de configurações padrão do Django para o Celery
os.environ.setdefault("DJANGO_SETTINGS_MODULE", "tablescout.settings")

app = Celery("tablescout")

# namespace='CELERY': as chaves do Celery nas configurações usam o prefixo CELERY_
app.config_from_object("django.conf:settings", namespace="CELERY")

# Carrega tasks.py de todas as aplicações registradas
app.autodiscover_tasks()
