from django.apps import AppConfig


class SynthbenchConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "backend.apps.synthbench"
