import json

import pytest
import requests

from backend.apps.adapters.blackbox import SampleParams
from backend.apps.adapters.endpoint import EndpointModel
from backend.apps.adapters.exceptions import (
    MalformedResponseError,
    ModelHTTPError,
    ModelTimeoutError,
    ModelTransportError,
)
from backend.apps.traces.records import StepRecord


def chat_response(mocker, content="ok", status_code=200, body=None):
    response = mocker.Mock()
    response.status_code = status_code
    payload = body if body is not None else {"choices": [{"message": {"role": "assistant", "content": content}}]}
    response.json.return_value = payload
    response.text = json.dumps(payload)
    return response


@pytest.fixture
def post(mocker):
    return mocker.patch("backend.apps.adapters.endpoint.requests.post")


@pytest.fixture(autouse=True)
def no_sleep(mocker):
    return mocker.patch("backend.apps.adapters.endpoint.time.sleep")


@pytest.fixture
def model(monkeypatch):
    monkeypatch.setenv("TRAC_TEST_KEY", "sk-secret-123")
    return EndpointModel(
        model="test-model",
        base_url="https://llm.example/v1/",
        api_key_env="TRAC_TEST_KEY",
        system_prompt="You are an agent.",
        retries=3,
        backoff=1.0,
        audit_log="",
    )


class TestRequestShape:
    def test_messages_alternate(self, model, post, mocker):
        post.return_value = chat_response(mocker, "move north")
        history = (StepRecord(t=1, input="look", output="a room"),)

        assert model.next_output(history, "go", SampleParams(temperature=0.2, seed=5)) == "move north"

        url = post.call_args.args[0]
        kwargs = post.call_args.kwargs
        assert url == "https://llm.example/v1/chat/completions"
        assert kwargs["json"]["messages"] == [
            {"role": "system", "content": "You are an agent."},
            {"role": "user", "content": "look"},
            {"role": "assistant", "content": "a room"},
            {"role": "user", "content": "go"},
        ]
        assert kwargs["json"]["temperature"] == 0.2
        assert kwargs["json"]["seed"] == 5
        assert kwargs["headers"]["Authorization"] == "Bearer sk-secret-123"
        assert kwargs["timeout"] == model.timeout

    def test_seed_omitted_when_unset(self, model, post, mocker):
        post.return_value = chat_response(mocker)
        model.next_output((), "hi", SampleParams())
        assert "seed" not in post.call_args.kwargs["json"]


class TestRetries:
    def test_unreachable_endpoint_fails_after_retries(self, model, post, no_sleep):
        post.side_effect = requests.ConnectionError("refused")
        with pytest.raises(ModelTransportError):
            model.next_output((), "hi", SampleParams())
        assert post.call_count == 3
        assert no_sleep.call_count == 2

    def test_timeout_is_distinct(self, model, post):
        post.side_effect = requests.Timeout("slow")
        with pytest.raises(ModelTimeoutError):
            model.next_output((), "hi", SampleParams())

    def test_server_error_then_success(self, model, post, mocker):
        post.side_effect = [chat_response(mocker, status_code=503, body={"error": "busy"}), chat_response(mocker, "fine")]
        assert model.next_output((), "hi", SampleParams()) == "fine"
        assert post.call_count == 2

    def test_backoff_grows(self, model, post, no_sleep):
        post.side_effect = requests.ConnectionError("refused")
        with pytest.raises(ModelTransportError):
            model.next_output((), "hi", SampleParams())
        first, second = (call.args[0] for call in no_sleep.call_args_list)
        assert 1.0 <= first <= 2.0
        assert 2.0 <= second <= 4.0

    def test_client_error_not_retried(self, model, post, mocker):
        post.return_value = chat_response(mocker, status_code=401, body={"error": "bad key"})
        with pytest.raises(ModelHTTPError) as excinfo:
            model.next_output((), "hi", SampleParams())
        assert excinfo.value.status_code == 401
        assert post.call_count == 1

    def test_rate_limit_retried(self, model, post, mocker):
        post.return_value = chat_response(mocker, status_code=429, body={"error": "slow down"})
        with pytest.raises(ModelHTTPError):
            model.next_output((), "hi", SampleParams())
        assert post.call_count == 3

    def test_malformed_body(self, model, post, mocker):
        post.return_value = chat_response(mocker, body={"choices": []})
        with pytest.raises(MalformedResponseError):
            model.next_output((), "hi", SampleParams())
        assert post.call_count == 1


class TestAuditLog:
    def test_key_redacted(self, monkeypatch, post, mocker, tmp_path):
        monkeypatch.setenv("TRAC_TEST_KEY", "sk-secret-123")
        log = tmp_path / "requests.jsonl"
        model = EndpointModel(model="m", base_url="https://llm.example/v1", api_key_env="TRAC_TEST_KEY", audit_log=log)
        post.return_value = chat_response(mocker, "echo sk-secret-123")

        model.next_output((), "my key is sk-secret-123", SampleParams())

        text = log.read_text()
        assert "sk-secret-123" not in text
        record = json.loads(text.splitlines()[0])
        assert record["status"] == 200
        assert record["request"]["messages"][-1]["content"] == "my key is ***"

    def test_disabled_by_default(self, model, post, mocker, tmp_path):
        post.return_value = chat_response(mocker)
        model.next_output((), "hi", SampleParams())
        assert model.audit_log is None


def test_model_name_required(settings):
    settings.TRAC_ENDPOINT_MODEL = ""
    with pytest.raises(ValueError, match="model name"):
        EndpointModel()
