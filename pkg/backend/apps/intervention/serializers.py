import json
from pathlib import Path

from rest_framework import serializers

from backend.apps.predictive.patterns import pattern_names

from .exceptions import PolicyError
from .policy import STRATEGIES, InterventionPolicy


class PolicySerializer(serializers.Serializer):
    strategy = serializers.ChoiceField(choices=STRATEGIES, default="none")
    tau = serializers.FloatField(min_value=0.0, max_value=1.0, required=False)
    n = serializers.IntegerField(min_value=1, required=False)
    k = serializers.IntegerField(min_value=1, required=False)
    m = serializers.IntegerField(min_value=1, required=False)
    pattern = serializers.CharField(default="contains_violated")
    substitute_model = serializers.CharField(required=False, allow_null=True, default=None)
    template_path = serializers.CharField(required=False, allow_null=True, default=None)

    def validate_pattern(self, value):
        if value not in pattern_names():
            raise serializers.ValidationError(f"Unknown pattern; known: {', '.join(pattern_names())}")
        return value

    def validate_template_path(self, value):
        if value is not None and not Path(value).is_file():
            raise serializers.ValidationError(f"Template file not found: {value}")
        return value

    def validate(self, attrs):
        if attrs.get("strategy") == "switch" and not attrs.get("substitute_model"):
            raise serializers.ValidationError({"substitute_model": "Required when strategy is switch."})
        return attrs

    def create(self, validated_data):
        return InterventionPolicy(**validated_data)


def policy_from_data(data: dict) -> InterventionPolicy:
    serializer = PolicySerializer(data=data)
    if not serializer.is_valid():
        raise PolicyError(f"Invalid policy: {serializer.errors}", errors=serializer.errors)
    return serializer.save()


def load_policy(path: str | Path) -> InterventionPolicy:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise PolicyError(f"Cannot read policy file {path}: {exc}") from exc
    return policy_from_data(data)
