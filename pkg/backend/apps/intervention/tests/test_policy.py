import json

import pytest
from django.test import override_settings

from backend.apps.intervention.exceptions import PolicyError
from backend.apps.intervention.policy import InterventionPolicy
from backend.apps.intervention.serializers import load_policy, policy_from_data


class TestInterventionPolicy:
    @override_settings(TRAC_INTERVENTION_THRESHOLD=0.4, TRAC_PREDICTIVE_HORIZON=2)
    def test_defaults_from_settings(self):
        policy = InterventionPolicy()
        assert policy.tau == 0.4
        assert policy.k == 2
        assert not policy.active

    @pytest.mark.parametrize(
        "options",
        [{"strategy": "retry"}, {"tau": 1.5}, {"tau": -0.1}, {"n": 0}, {"m": 0}, {"pattern": "nope"}],
    )
    def test_invalid(self, options):
        with pytest.raises(PolicyError):
            InterventionPolicy(**options)


class TestPolicySerializer:
    def test_valid(self):
        policy = policy_from_data({"strategy": "resample", "tau": 0.3, "n": 4})
        assert policy.strategy == "resample"
        assert policy.tau == 0.3
        assert policy.n == 4
        assert policy.active

    def test_switch_needs_substitute(self):
        with pytest.raises(PolicyError) as excinfo:
            policy_from_data({"strategy": "switch"})
        assert "substitute_model" in excinfo.value.errors

    def test_field_errors(self):
        with pytest.raises(PolicyError) as excinfo:
            policy_from_data({"strategy": "retry", "tau": 2, "pattern": "nope"})
        assert set(excinfo.value.errors) == {"strategy", "tau", "pattern"}

    def test_missing_template(self, tmp_path):
        with pytest.raises(PolicyError) as excinfo:
            policy_from_data({"strategy": "inject", "template_path": str(tmp_path / "missing.txt")})
        assert "template_path" in excinfo.value.errors

    def test_load_policy(self, tmp_path):
        path = tmp_path / "policy.json"
        path.write_text(json.dumps({"strategy": "switch", "substitute_model": "safe"}), encoding="utf-8")
        policy = load_policy(path)
        assert policy.substitute_model == "safe"

    def test_unreadable_file(self, tmp_path):
        path = tmp_path / "policy.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(PolicyError, match="Cannot read policy file"):
            load_policy(path)
