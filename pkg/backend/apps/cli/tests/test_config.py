import pytest

from backend.apps.adapters.blackbox import ScriptedModel, StochasticScriptModel
from backend.apps.adapters.endpoint import EndpointModel
from backend.apps.adapters.labelers import EmbeddedLabeler, RuleLabeler
from backend.apps.cli.exceptions import ConfigError
from backend.apps.cli.factories import build_labeler, build_model, named_model
from backend.apps.cli.serializers import config_from_data, load_config
from backend.apps.ltl.parser import parse
from backend.apps.traces.records import StepRecord


def config_data(**overrides):
    data = {
        "constraints": [{"id": "no_bad", "formula": "G !bad"}],
        "labeler": {"kind": "rules", "rules": {"bad": "^bad$"}},
        "models": {
            "agent": {"kind": "scripted", "outputs": ["bad"], "cycle": True},
            "safe": {"kind": "scripted", "outputs": ["good"], "cycle": True},
        },
        "agent": "agent",
        "policy": {"strategy": "switch", "substitute_model": "safe", "tau": 0.4, "k": 1, "m": 2},
    }
    data.update(overrides)
    return data


class TestConfigSerializer:
    def test_valid_config(self):
        config = config_from_data(config_data(inputs=["Start."], seed=7))
        assert config.constraints[0].formula == parse("G !bad")
        assert config.policy.strategy == "switch"
        assert config.policy.tau == 0.4
        assert config.mode == "reset"
        assert config.inputs == ("Start.",)
        assert config.seed == 7
        assert config.outputs == {}

    def test_policy_defaults(self, settings):
        settings.TRAC_RESAMPLE_CANDIDATES = 9
        config = config_from_data(config_data(policy={"strategy": "resample"}))
        assert config.policy.n == 9

    def test_missing_policy_is_none_strategy(self):
        assert config_from_data(config_data(policy={})).policy.strategy == "none"

    def test_bad_formula(self):
        with pytest.raises(ConfigError) as excinfo:
            config_from_data(config_data(constraints=[{"id": "x", "formula": "G(a ->"}]))
        assert "constraints" in excinfo.value.errors

    def test_duplicate_ids(self):
        constraints = [{"id": "x", "formula": "a"}, {"id": "x", "formula": "b"}]
        with pytest.raises(ConfigError, match="Duplicate constraint ids: x"):
            config_from_data(config_data(constraints=constraints))

    def test_unknown_model_reference(self):
        with pytest.raises(ConfigError) as excinfo:
            config_from_data(config_data(agent="ghost"))
        assert "agent" in excinfo.value.errors

    def test_switch_needs_substitute(self):
        with pytest.raises(ConfigError) as excinfo:
            config_from_data(config_data(policy={"strategy": "switch"}))
        assert "substitute_model" in excinfo.value.errors["policy"]

    def test_scripted_model_needs_outputs(self):
        with pytest.raises(ConfigError, match="outputs"):
            config_from_data(config_data(models={"agent": {"kind": "scripted"}}, policy={}))

    def test_endpoint_labeler_needs_vocabulary(self):
        labeler = {"kind": "endpoint", "model": "agent"}
        with pytest.raises(ConfigError, match="vocabulary"):
            config_from_data(config_data(labeler=labeler))

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(ConfigError, match="Cannot read config file"):
            load_config(tmp_path / "missing.json")

    def test_not_an_object(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("[]")
        with pytest.raises(ConfigError, match="JSON object"):
            load_config(path)


class TestFactories:
    def test_models(self):
        config = config_from_data(config_data())
        model = named_model(config, config.agent, "agent")
        assert isinstance(model, ScriptedModel)
        assert model.cycle

    def test_missing_role(self):
        config = config_from_data(config_data())
        with pytest.raises(ConfigError, match="no judge model"):
            named_model(config, config.judge, "judge")

    def test_stochastic_model(self):
        model = build_model({"kind": "stochastic", "distributions": [{"a": 0.5, "b": 0.5}], "seed": 3})
        assert isinstance(model, StochasticScriptModel)

    def test_invalid_distribution(self):
        with pytest.raises(ConfigError, match="stochastic"):
            build_model({"kind": "stochastic", "distributions": [{"a": 0.5}]})

    def test_endpoint_without_model_name(self, settings):
        settings.TRAC_ENDPOINT_MODEL = ""
        with pytest.raises(ConfigError, match="endpoint"):
            build_model({"kind": "endpoint"})

    def test_endpoint_options_reach_the_client(self):
        agent = {
            "kind": "endpoint",
            "model": "local-model",
            "base_url": "http://localhost:8000/v1/",
            "api_key_env": "LOCAL_KEY",
            "timeout": 5,
            "retries": 2,
            "backoff": 0,
            "max_in_flight": 1,
        }
        config = config_from_data(config_data(models={"agent": agent}, policy={}))
        model = named_model(config, config.agent, "agent")
        assert isinstance(model, EndpointModel)
        assert model.base_url == "http://localhost:8000/v1"
        assert (model.api_key_env, model.timeout, model.retries, model.backoff) == ("LOCAL_KEY", 5.0, 2, 0.0)

    def test_rule_labeler(self):
        assert isinstance(build_labeler(config_from_data(config_data())), RuleLabeler)

    def test_embedded_labeler_from_steps(self):
        config = config_from_data(config_data(labeler={"kind": "embedded"}))
        labeler = build_labeler(config, [StepRecord(t=1, input="", output="x", labels=frozenset({"bad"}))])
        assert isinstance(labeler, EmbeddedLabeler)
        assert labeler.vocabulary == {"bad"}

    def test_no_labeler(self):
        config = config_from_data(config_data(labeler=None))
        with pytest.raises(ConfigError, match="no labeler"):
            build_labeler(config)

    def test_invalid_rule(self):
        config = config_from_data(config_data(labeler={"kind": "rules", "rules": {"bad": {"pattern": "x", "field": "title"}}}))
        with pytest.raises(ConfigError, match="rules labeler"):
            build_labeler(config)
