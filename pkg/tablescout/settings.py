"""
Django settings for tablescout project.

O projeto não tem banco de dados nem interface HTTP: o Django fornece a
configuração, o logging e os comandos de gerenciamento (detect, batch, eval,
synth).
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Load environment variables from .env file
load_dotenv(BASE_DIR / ".env")

SECRET_KEY = os.getenv("SECRET_KEY", "django-insecure-tablescout-dev-key")

DEBUG = os.getenv("DEBUG", "True") == "True"

ALLOWED_HOSTS = []

INSTALLED_APPS = [
    "apps.table_detection",
]

DATABASES = {}

LANGUAGE_CODE = "pt-br"

TIME_ZONE = "America/Sao_Paulo"

USE_I18N = True

USE_TZ = True

# tablescout
TABLESCOUT_JOBS = int(os.getenv("TABLESCOUT_JOBS", "1"))
TABLESCOUT_CONFIG = os.getenv("TABLESCOUT_CONFIG") or None
TABLESCOUT_LOG_LEVEL = os.getenv("TABLESCOUT_LOG_LEVEL", "INFO").upper()
TABLESCOUT_LOG_FILE = os.getenv("TABLESCOUT_LOG_FILE") or None

# Celery Configuration
CELERY_BROKER_URL = os.getenv("REDIS_URL", "redis://localhost:6379/1")
CELERY_RESULT_BACKEND = os.getenv("REDIS_URL", "redis://localhost:6379/1")
CELERY_ACCEPT_CONTENT = ["json"]
CELERY_TASK_SERIALIZER = "json"
CELERY_RESULT_SERIALIZER = "json"
CELERY_TIMEZONE = TIME_ZONE
# Sem broker configurado as tarefas rodam no próprio processo
CELERY_TASK_ALWAYS_EAGER = os.getenv("CELERY_TASK_ALWAYS_EAGER", "True") == "True"
CELERY_TASK_EAGER_PROPAGATES = True

# Logging Configuration
_log_handlers = ["console"]
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {module} {process:d} {message}",
            "style": "{",
        },
        "simple": {
            "format": "{levelname} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
    },
    "root": {
        "handlers": _log_handlers,
        "level": "WARNING",
    },
    "loggers": {
        "apps.table_detection": {
            "handlers": _log_handlers,
            "level": TABLESCOUT_LOG_LEVEL,
            "propagate": False,
        },
        "celery": {
            "handlers": _log_handlers,
            "level": "INFO",
            "propagate": False,
        },
    },
}
if TABLESCOUT_LOG_FILE:
    Path(TABLESCOUT_LOG_FILE).parent.mkdir(parents=True, exist_ok=True)
    LOGGING["handlers"]["file"] = {
        "level": "INFO",
        "class": "logging.handlers.RotatingFileHandler",
        "filename": TABLESCOUT_LOG_FILE,
        "maxBytes": 1024 * 1024 * 5,  # 5 MB
        "backupCount": 5,
        "formatter": "verbose",
    }
    _log_handlers.append("file")
