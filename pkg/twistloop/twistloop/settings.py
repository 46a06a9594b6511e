"""
Django settings for twistloop project.

The project serves no URLs; Django supplies configuration, the management
command entry point and the report archive.
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get(
    "TWISTLOOP_SECRET_KEY", "django-insecure-twistloop-local-computation-only"
)

DEBUG = True

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "ninja",  # Schema 기반 payload 검증
    "coherence",  # 계산 앱
]


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": BASE_DIR / "db.sqlite3",
    }
}


# Internationalization

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


# 계산 관련 설정
TWISTLOOP = {
    "INTERVAL_CAP": 20000,  # Bruhat 구간 최대 원소 수
    "LENGTH_CAP": 24,  # l(t_λ) 상한
    "FIBER_CAP": 200000,  # fiber 열거 추정치 상한
    "SERIES_PRECISION": 4,
    "DEFAULT_SPECIAL_NODE": 0,
    "SEED": 0,
    "SCHEMA_VERSION": "1",
    "PROVEN_FAMILIES": ["A(1)", "C(1)"],  # SL_n, Sp_2n
}


LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "%(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "console": {"class": "logging.StreamHandler", "formatter": "plain"},
    },
    "loggers": {
        "coherence": {
            "handlers": ["console"],
            "level": os.environ.get("TWISTLOOP_LOG_LEVEL", "WARNING"),
        },
    },
}
