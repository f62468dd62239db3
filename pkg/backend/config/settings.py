"""
Django settings for the TRAC toolkit, read with python-decouple.

There is no web surface: Django provides the app registry, the template
engine for prompt texts and the management-command CLI.
"""
from pathlib import Path

from decouple import config

# CORE DJANGO SETTINGS

BASE_DIR = Path(__file__).resolve().parent.parent.parent
SECRET_KEY = config("SECRET_KEY", default="trac-local-development-key")
DEBUG = config("DEBUG", default=False, cast=bool)
LOG_LEVEL = config("LOG_LEVEL", default="INFO")

LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True

# INSTALLED APPS

INSTALLED_APPS = [
    # Third-party
    "rest_framework",
    # Local apps
    "backend.apps.ltl",
    "backend.apps.traces",
    "backend.apps.monitoring",
    "backend.apps.predictive",
    "backend.apps.intervention",
    "backend.apps.adapters",
    "backend.apps.synthbench",
    "backend.apps.cli",
]

# No persistence: traces, reports and bench files are plain JSON/JSONL.
DATABASES = {}

# TEMPLATES (prompt texts, rendered as plain text)

TEMPLATES = [
    {
        "BACKEND": "django.template.backends.django.DjangoTemplates",
        "DIRS": [BASE_DIR / "backend" / "templates"],
        "APP_DIRS": False,
        "OPTIONS": {
            "autoescape": False,
        },
    },
]

# LOGGING

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "%(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "plain",
        },
    },
    "loggers": {
        "backend": {
            "handlers": ["console"],
            "level": LOG_LEVEL,
            "propagate": False,
        },
    },
}

# MONITORING

TRAC_STOP_TOKEN = config("TRAC_STOP_TOKEN", default="DONE")

# Predictive monitor: horizon k, samples m
TRAC_PREDICTIVE_HORIZON = config("TRAC_PREDICTIVE_HORIZON", default=3, cast=int)
TRAC_PREDICTIVE_SAMPLES = config("TRAC_PREDICTIVE_SAMPLES", default=5, cast=int)
TRAC_SAMPLING_WORKERS = config("TRAC_SAMPLING_WORKERS", default=1, cast=int)
TRAC_SAMPLING_CALL_BUDGET = config("TRAC_SAMPLING_CALL_BUDGET", default=10000, cast=int)

# Interventions
TRAC_INTERVENTION_THRESHOLD = config("TRAC_INTERVENTION_THRESHOLD", default=0.5, cast=float)
TRAC_RESAMPLE_CANDIDATES = config("TRAC_RESAMPLE_CANDIDATES", default=5, cast=int)

# Sampling temperatures
TRAC_ACTION_TEMPERATURE = config("TRAC_ACTION_TEMPERATURE", default=0.2, cast=float)
TRAC_SAMPLING_TEMPERATURE = config("TRAC_SAMPLING_TEMPERATURE", default=0.8, cast=float)
TRAC_JUDGE_TEMPERATURE = config("TRAC_JUDGE_TEMPERATURE", default=0.2, cast=float)

# CHAT ENDPOINT

TRAC_ENDPOINT_BASE_URL = config(
    "TRAC_ENDPOINT_BASE_URL",
    default="https://openrouter.ai/api/v1",
).rstrip("/")
TRAC_ENDPOINT_MODEL = config("TRAC_ENDPOINT_MODEL", default="")
TRAC_API_KEY_ENV = config("TRAC_API_KEY_ENV", default="TRAC_API_KEY")
TRAC_ENDPOINT_TIMEOUT = config("TRAC_ENDPOINT_TIMEOUT", default=30.0, cast=float)
TRAC_ENDPOINT_RETRIES = config("TRAC_ENDPOINT_RETRIES", default=3, cast=int)
TRAC_ENDPOINT_BACKOFF = config("TRAC_ENDPOINT_BACKOFF", default=1.0, cast=float)
TRAC_ENDPOINT_MAX_IN_FLIGHT = config("TRAC_ENDPOINT_MAX_IN_FLIGHT", default=4, cast=int)
TRAC_REQUEST_AUDIT_LOG = config("TRAC_REQUEST_AUDIT_LOG", default="")

# Character budget for history passed to endpoint labelers
TRAC_LABELER_CONTEXT_CHARS = config("TRAC_LABELER_CONTEXT_CHARS", default=8000, cast=int)

# Sentry Monitoring
SENTRY_DSN = config("SENTRY_DSN", default="")
if SENTRY_DSN and not DEBUG:
    import sentry_sdk
    sentry_sdk.init(dsn=SENTRY_DSN, traces_sample_rate=0.1)
