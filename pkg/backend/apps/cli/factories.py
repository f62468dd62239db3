"""
Build models and labelers from the specs of an experiment config.
"""
import logging
from collections.abc import Iterable

from backend.apps.adapters.blackbox import BlackBoxModel, ScriptedModel, StochasticScriptModel
from backend.apps.adapters.endpoint import EndpointModel
from backend.apps.adapters.labelers import AttributeLabeler, EmbeddedLabeler, EndpointLabeler, RuleLabeler
from backend.apps.traces.labeling import LabelingFunction
from backend.apps.traces.records import StepRecord

from .exceptions import ConfigError
from .serializers import Config

logger = logging.getLogger(__name__)


def build_model(spec: dict) -> BlackBoxModel:
    try:
        match spec["kind"]:
            case "scripted":
                return ScriptedModel(spec["outputs"], stop_token=spec.get("stop_token"), cycle=spec.get("cycle", False))
            case "stochastic":
                return StochasticScriptModel(
                    spec["distributions"],
                    seed=spec.get("seed", 0),
                    stop_token=spec.get("stop_token"),
                    cycle=spec.get("cycle", False),
                )
            case "endpoint":
                return EndpointModel(
                    model=spec.get("model") or None,
                    base_url=spec.get("base_url"),
                    system_prompt=spec.get("system_prompt", ""),
                    max_tokens=spec.get("max_tokens"),
                    api_key_env=spec.get("api_key_env"),
                    timeout=spec.get("timeout"),
                    retries=spec.get("retries"),
                    backoff=spec.get("backoff"),
                    max_in_flight=spec.get("max_in_flight"),
                    audit_log=spec.get("audit_log"),
                )
    except ValueError as exc:
        raise ConfigError(f"Invalid {spec['kind']} model: {exc}") from exc
    raise ConfigError(f"Unknown model kind {spec['kind']!r}")


def named_model(config: Config, name: str | None, role: str) -> BlackBoxModel:
    if not name:
        raise ConfigError(f"The config names no {role} model")
    return build_model(config.models[name])


def build_labeler(config: Config, steps: Iterable[StepRecord] = ()) -> LabelingFunction:
    """
    The config's labeler. An embedded labeler without a declared vocabulary
    takes it from the labels already present on ``steps``.
    """
    spec = config.labeler
    if spec is None:
        raise ConfigError("The config declares no labeler and the trace is not labeled")
    try:
        match spec["kind"]:
            case "rules":
                return RuleLabeler(spec["rules"], ignore_case=spec.get("ignore_case", False))
            case "attributes":
                return AttributeLabeler(entities=spec.get("entities", 1))
            case "embedded":
                if spec.get("vocabulary"):
                    return EmbeddedLabeler(spec["vocabulary"])
                return EmbeddedLabeler.for_steps(steps)
            case "endpoint":
                model = named_model(config, spec["model"], "labeler")
                return EndpointLabeler(model, spec["vocabulary"], descriptions=spec.get("descriptions"))
    except (ValueError, KeyError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"Invalid {spec['kind']} labeler: {exc}") from exc
    raise ConfigError(f"Unknown labeler kind {spec['kind']!r}")
