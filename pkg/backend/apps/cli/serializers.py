"""
Experiment configuration: one JSON document naming the constraints, the
labeler, the models, the intervention policy and the output paths.
"""
import json
from dataclasses import dataclass, field
from pathlib import Path

from rest_framework import serializers

from backend.apps.intervention.exceptions import PolicyError
from backend.apps.intervention.policy import InterventionPolicy
from backend.apps.intervention.serializers import PolicySerializer
from backend.apps.ltl.exceptions import FormulaSyntaxError
from backend.apps.ltl.parser import parse
from backend.apps.monitoring.engine import MODES, Constraint
from backend.apps.traces.serializers import VerbatimTextField, validate_proposition_names

from .exceptions import ConfigError

MODEL_KINDS = ("scripted", "stochastic", "endpoint")
LABELER_KINDS = ("rules", "attributes", "embedded", "endpoint")


@dataclass(frozen=True)
class Config:
    constraints: tuple[Constraint, ...]
    policy: InterventionPolicy
    models: dict[str, dict] = field(default_factory=dict)
    labeler: dict | None = None
    agent: str | None = None
    judge: str | None = None
    mode: str = "reset"
    seed: int = 0
    inputs: tuple[str, ...] = ()
    outputs: dict[str, str] = field(default_factory=dict)


class ConstraintSerializer(serializers.Serializer):
    id = serializers.CharField()
    formula = serializers.CharField()
    gloss = serializers.CharField(required=False, default="", allow_blank=True)

    def validate_formula(self, value):
        try:
            return parse(value)
        except FormulaSyntaxError as exc:
            raise serializers.ValidationError(str(exc)) from exc


class ModelSpecSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=MODEL_KINDS)
    # scripted
    outputs = serializers.ListField(child=VerbatimTextField(), required=False)
    # stochastic: one {output: probability} mapping per step
    distributions = serializers.ListField(child=serializers.DictField(child=serializers.FloatField(min_value=0.0)), required=False)
    cycle = serializers.BooleanField(default=False)
    seed = serializers.IntegerField(default=0)
    stop_token = serializers.CharField(required=False, allow_null=True, default=None)
    # endpoint
    model = serializers.CharField(required=False, allow_blank=True, default="")
    base_url = serializers.CharField(required=False, allow_null=True, default=None)
    system_prompt = serializers.CharField(required=False, allow_blank=True, default="")
    max_tokens = serializers.IntegerField(required=False, allow_null=True, default=None, min_value=1)
    api_key_env = serializers.CharField(required=False, allow_null=True, default=None)
    timeout = serializers.FloatField(required=False, allow_null=True, default=None, min_value=0.0)
    retries = serializers.IntegerField(required=False, allow_null=True, default=None, min_value=1)
    backoff = serializers.FloatField(required=False, allow_null=True, default=None, min_value=0.0)
    max_in_flight = serializers.IntegerField(required=False, allow_null=True, default=None, min_value=1)
    audit_log = serializers.CharField(required=False, allow_null=True, default=None)

    def validate(self, attrs):
        if attrs["kind"] == "scripted" and "outputs" not in attrs:
            raise serializers.ValidationError({"outputs": "Required for scripted models."})
        if attrs["kind"] == "stochastic" and not attrs.get("distributions"):
            raise serializers.ValidationError({"distributions": "Required for stochastic models."})
        return attrs


class LabelerSpecSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=LABELER_KINDS)
    # rules: proposition -> regex or {"pattern", "field"}
    rules = serializers.DictField(required=False)
    ignore_case = serializers.BooleanField(default=False)
    entities = serializers.IntegerField(min_value=1, default=1)
    vocabulary = serializers.ListField(child=serializers.CharField(), required=False)
    descriptions = serializers.DictField(child=serializers.CharField(), required=False, default=dict)
    # endpoint: name of the model that answers labeling prompts
    model = serializers.CharField(required=False)

    def validate_vocabulary(self, value):
        return validate_proposition_names(value)

    def validate(self, attrs):
        if attrs["kind"] == "rules" and not attrs.get("rules"):
            raise serializers.ValidationError({"rules": "Required for rule labelers."})
        if attrs["kind"] == "endpoint":
            if not attrs.get("model"):
                raise serializers.ValidationError({"model": "Required for endpoint labelers."})
            if not attrs.get("vocabulary"):
                raise serializers.ValidationError({"vocabulary": "Required for endpoint labelers."})
        return attrs


class OutputsSerializer(serializers.Serializer):
    trace = serializers.CharField(required=False)
    reports = serializers.CharField(required=False)
    log = serializers.CharField(required=False)


class ConfigSerializer(serializers.Serializer):
    constraints = ConstraintSerializer(many=True, allow_empty=False)
    models = serializers.DictField(child=ModelSpecSerializer(), required=False, default=dict)
    labeler = LabelerSpecSerializer(required=False, allow_null=True, default=None)
    agent = serializers.CharField(required=False, allow_null=True, default=None)
    judge = serializers.CharField(required=False, allow_null=True, default=None)
    policy = PolicySerializer(required=False)
    mode = serializers.ChoiceField(choices=MODES, default="reset")
    seed = serializers.IntegerField(default=0)
    inputs = serializers.ListField(child=VerbatimTextField(), required=False, default=list)
    outputs = OutputsSerializer(required=False)

    def validate_constraints(self, value):
        ids = [item["id"] for item in value]
        duplicates = sorted({constraint_id for constraint_id in ids if ids.count(constraint_id) > 1})
        if duplicates:
            raise serializers.ValidationError(f"Duplicate constraint ids: {', '.join(duplicates)}")
        return value

    def validate(self, attrs):
        models = attrs["models"]
        references = {
            "agent": attrs.get("agent"),
            "judge": attrs.get("judge"),
            "policy": (attrs.get("policy") or {}).get("substitute_model"),
            "labeler": (attrs.get("labeler") or {}).get("model"),
        }
        unknown = {key: f"Unknown model {name!r}." for key, name in references.items() if name and name not in models}
        if unknown:
            raise serializers.ValidationError(unknown)
        return attrs

    def create(self, validated_data):
        return Config(
            constraints=tuple(Constraint(**item) for item in validated_data["constraints"]),
            policy=InterventionPolicy(**validated_data.get("policy", {})),
            models={name: dict(spec) for name, spec in validated_data["models"].items()},
            labeler=dict(validated_data["labeler"]) if validated_data["labeler"] else None,
            agent=validated_data["agent"],
            judge=validated_data["judge"],
            mode=validated_data["mode"],
            seed=validated_data["seed"],
            inputs=tuple(validated_data["inputs"]),
            outputs=dict(validated_data.get("outputs", {})),
        )


def config_from_data(data: dict) -> Config:
    serializer = ConfigSerializer(data=data)
    if not serializer.is_valid():
        raise ConfigError(f"Invalid config: {json.dumps(serializer.errors, ensure_ascii=False)}", errors=serializer.errors)
    try:
        return serializer.save()
    except PolicyError as exc:
        raise ConfigError(f"Invalid config: {exc}", errors={"policy": [str(exc)]}) from exc


def load_config(path: str | Path) -> Config:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"Cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must hold a JSON object")
    return config_from_data(data)
