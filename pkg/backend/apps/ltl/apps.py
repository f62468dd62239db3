from django.apps import AppConfig


class LtlConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "backend.apps.ltl"
