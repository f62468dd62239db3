"""
Chat-completions endpoint client.

This module is the only place in the project that performs network requests.
"""
import json
import logging
import random
import threading
import time
from collections.abc import Sequence
from pathlib import Path

import requests
from decouple import config
from django.conf import settings

from backend.apps.traces.records import StepRecord

from .blackbox import SampleParams
from .exceptions import (
    MalformedResponseError,
    ModelError,
    ModelHTTPError,
    ModelTimeoutError,
    ModelTransportError,
)

logger = logging.getLogger(__name__)

REDACTED = "***"


class EndpointModel:
    """
    A model served behind an OpenAI-style ``/chat/completions`` endpoint.

    History steps become alternating user/assistant messages; the current
    input is the final user message.
    """

    def __init__(
        self,
        model: str | None = None,
        base_url: str | None = None,
        api_key_env: str | None = None,
        system_prompt: str = "",
        max_tokens: int | None = None,
        timeout: float | None = None,
        retries: int | None = None,
        backoff: float | None = None,
        max_in_flight: int | None = None,
        audit_log: str | Path | None = None,
    ):
        self.model = model or settings.TRAC_ENDPOINT_MODEL
        self.base_url = (base_url or settings.TRAC_ENDPOINT_BASE_URL).rstrip("/")
        self.api_key_env = api_key_env or settings.TRAC_API_KEY_ENV
        self.system_prompt = system_prompt
        self.max_tokens = max_tokens
        self.timeout = settings.TRAC_ENDPOINT_TIMEOUT if timeout is None else timeout
        self.retries = max(1, settings.TRAC_ENDPOINT_RETRIES if retries is None else retries)
        self.backoff = settings.TRAC_ENDPOINT_BACKOFF if backoff is None else backoff
        self._slots = threading.BoundedSemaphore(
            settings.TRAC_ENDPOINT_MAX_IN_FLIGHT if max_in_flight is None else max_in_flight
        )
        audit_log = settings.TRAC_REQUEST_AUDIT_LOG if audit_log is None else audit_log
        self.audit_log = Path(audit_log) if audit_log else None
        self._audit_lock = threading.Lock()

        if not self.model:
            raise ValueError("EndpointModel needs a model name (TRAC_ENDPOINT_MODEL)")

    @property
    def url(self) -> str:
        return f"{self.base_url}/chat/completions"

    def _api_key(self) -> str:
        return config(self.api_key_env, default="")

    # REQUEST BUILDING

    def messages(self, history: Sequence[StepRecord], input: str) -> list[dict]:
        messages = []
        if self.system_prompt:
            messages.append({"role": "system", "content": self.system_prompt})
        for record in history:
            messages.append({"role": "user", "content": record.input})
            messages.append({"role": "assistant", "content": record.output})
        messages.append({"role": "user", "content": input})
        return messages

    def payload(self, history: Sequence[StepRecord], input: str, params: SampleParams) -> dict:
        payload = {
            "model": self.model,
            "messages": self.messages(history, input),
            "temperature": params.temperature,
        }
        max_tokens = params.max_tokens or self.max_tokens
        if max_tokens:
            payload["max_tokens"] = max_tokens
        if params.seed is not None:
            payload["seed"] = params.seed
        return payload

    def complete(self, prompt: str, params: SampleParams) -> str:
        """Single-turn convenience call."""
        return self.next_output((), prompt, params)

    # TRANSPORT

    def next_output(self, history: Sequence[StepRecord], input: str, params: SampleParams) -> str:
        payload = self.payload(history, input, params)
        api_key = self._api_key()
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        else:
            logger.warning(f"No API key in ${self.api_key_env}; sending unauthenticated request")

        last_error: ModelError | None = None
        for attempt in range(1, self.retries + 1):
            try:
                with self._slots:
                    response = requests.post(self.url, json=payload, headers=headers, timeout=self.timeout)
            except requests.Timeout as exc:
                last_error = ModelTimeoutError(f"request to {self.url} timed out after {self.timeout}s")
                last_error.__cause__ = exc
                self._audit(payload, None, str(exc), attempt, api_key)
            except requests.RequestException as exc:
                last_error = ModelTransportError(f"request to {self.url} failed: {exc}")
                last_error.__cause__ = exc
                self._audit(payload, None, str(exc), attempt, api_key)
            else:
                self._audit(payload, response.status_code, response.text, attempt, api_key)
                if response.status_code == 429 or response.status_code >= 500:
                    last_error = ModelHTTPError(response.status_code, response.text)
                elif response.status_code >= 400:
                    raise ModelHTTPError(response.status_code, response.text)
                else:
                    return self._parse(response)

            if attempt < self.retries:
                delay = self.backoff * (2 ** (attempt - 1))
                delay += random.uniform(0, delay)
                logger.warning(f"Endpoint attempt {attempt}/{self.retries} failed ({last_error}); retrying in {delay:.2f}s")
                time.sleep(delay)

        logger.error(f"Endpoint {self.url} failed after {self.retries} attempts: {last_error}")
        raise last_error

    def _parse(self, response: requests.Response) -> str:
        try:
            body = response.json()
            content = body["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise MalformedResponseError(f"unexpected response body: {response.text[:200]!r}") from exc
        if not isinstance(content, str):
            raise MalformedResponseError(f"message content is {type(content).__name__}, not text")
        return content

    def _audit(self, payload: dict, status: int | None, body: str, attempt: int, api_key: str) -> None:
        if self.audit_log is None:
            return
        record = {
            "url": self.url,
            "attempt": attempt,
            "request": payload,
            "status": status,
            "response": body,
        }
        line = json.dumps(record, ensure_ascii=False)
        if api_key:
            line = line.replace(api_key, REDACTED)
        with self._audit_lock:
            self.audit_log.parent.mkdir(parents=True, exist_ok=True)
            with self.audit_log.open("a", encoding="utf-8") as handle:
                handle.write(line + "\n")
