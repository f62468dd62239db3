"""
The black-box model interface and its scripted implementations.

A model maps the history of (input, output) pairs plus the current input to
the next output. Scripted models are deterministic given their seed and the
per-call sample seed, so concurrent draws do not depend on call order.
"""
import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np
from django.conf import settings

from backend.apps.traces.records import StepRecord

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SampleParams:
    temperature: float = 0.2
    max_tokens: int | None = None
    # per-call seed; independent samples get distinct seeds
    seed: int | None = None


@runtime_checkable
class BlackBoxModel(Protocol):
    def next_output(self, history: Sequence[StepRecord], input: str, params: SampleParams) -> str: ...


def action_params(seed: int | None = None) -> SampleParams:
    return SampleParams(temperature=settings.TRAC_ACTION_TEMPERATURE, seed=seed)


def sampling_params(seed: int | None = None) -> SampleParams:
    return SampleParams(temperature=settings.TRAC_SAMPLING_TEMPERATURE, seed=seed)


def next_output(
    model: BlackBoxModel,
    history: Sequence[StepRecord],
    input: str,
    params: SampleParams | None = None,
) -> str:
    """Query ``model`` for the output at step ``len(history) + 1``."""
    for index, record in enumerate(history, start=1):
        if record.t != index:
            raise ValueError(f"History is not contiguous at position {index} (t={record.t})")
    return model.next_output(tuple(history), input, params or action_params())


# SCRIPTED MODELS


class ScriptedModel:
    """Replays a fixed output sequence; the output at step t is ``outputs[t - 1]``."""

    def __init__(self, outputs: Sequence[str], stop_token: str | None = None, cycle: bool = False):
        self.outputs = list(outputs)
        self.stop_token = settings.TRAC_STOP_TOKEN if stop_token is None else stop_token
        self.cycle = cycle
        if cycle and not self.outputs:
            raise ValueError("A cycling script needs at least one output")

    def next_output(self, history: Sequence[StepRecord], input: str, params: SampleParams) -> str:
        index = len(history)
        if self.cycle:
            return self.outputs[index % len(self.outputs)]
        if index < len(self.outputs):
            return self.outputs[index]
        return self.stop_token


class StochasticScriptModel:
    """
    Per-step categorical distributions over outputs.

    The generator for a call is seeded from (model seed, step, sample seed),
    so the same call always yields the same output.
    """

    def __init__(
        self,
        distributions: Sequence[Mapping[str, float]],
        seed: int = 0,
        stop_token: str | None = None,
        cycle: bool = False,
    ):
        self.steps = []
        for index, distribution in enumerate(distributions, start=1):
            outputs = list(distribution)
            weights = np.array([distribution[output] for output in outputs], dtype=float)
            if not outputs or (weights < 0).any() or not np.isclose(weights.sum(), 1.0):
                raise ValueError(f"Step {index}: probabilities must be nonnegative and sum to 1")
            self.steps.append((outputs, weights))
        self.seed = seed
        self.stop_token = settings.TRAC_STOP_TOKEN if stop_token is None else stop_token
        self.cycle = cycle
        if cycle and not self.steps:
            raise ValueError("A cycling script needs at least one step")

    @classmethod
    def bernoulli(cls, bad: str, good: str, p: float, seed: int = 0) -> "StochasticScriptModel":
        """Emit ``bad`` with probability ``p`` at every step."""
        return cls([{bad: p, good: 1.0 - p}], seed=seed, cycle=True)

    def next_output(self, history: Sequence[StepRecord], input: str, params: SampleParams) -> str:
        index = len(history)
        if self.cycle:
            index %= len(self.steps)
        elif index >= len(self.steps):
            return self.stop_token

        entropy = [self.seed, len(history)]
        if params.seed is not None:
            entropy.append(params.seed)
        rng = np.random.default_rng(entropy)
        outputs, weights = self.steps[index]
        return outputs[int(rng.choice(len(outputs), p=weights))]
