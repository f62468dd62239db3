"""
Sampling-based predictive monitor.

The probability that a monitoring pattern occurs within the next k steps is
estimated by drawing m continuations of the current history from the model,
labeling and monitoring each on a copy of the monitor states, and counting the
continuations whose verdict sequence (current verdict first) matches.
"""
import logging
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from backend.apps.adapters.blackbox import BlackBoxModel, sampling_params
from backend.apps.adapters.exceptions import ModelError
from backend.apps.ltl.formula import Verdict
from backend.apps.monitoring.engine import MonitorState, step
from backend.apps.traces.exceptions import LabelingError
from backend.apps.traces.labeling import LabelingFunction, label_step
from backend.apps.traces.records import StepRecord

from .exceptions import PredictionError, SamplingBudgetError
from .patterns import MonitoringPattern, get_pattern

logger = logging.getLogger(__name__)

METHODS = ("sampling", "direct")

# seed stream tags
ACTION, ESTIMATE, RESAMPLE, CONTRACT = 0, 1, 2, 3


def derive_seed(*parts: int) -> int:
    """A 32-bit seed that depends on every part, for independent sub-streams."""
    return int(np.random.SeedSequence([int(part) for part in parts]).generate_state(1)[0])


@dataclass(frozen=True)
class RiskEstimate:
    constraint_id: str
    probability: float
    matches: int
    samples: int
    horizon: int
    # one verdict sequence per continuation, current verdict first
    sequences: tuple[tuple[Verdict, ...], ...] = ()

    def to_dict(self) -> dict:
        return {
            "constraint": self.constraint_id,
            "probability": self.probability,
            "matches": self.matches,
            "m": self.samples,
            "k": self.horizon,
        }


def rollout(
    states: Sequence[MonitorState],
    model: BlackBoxModel,
    labeler: LabelingFunction,
    history: Sequence[StepRecord],
    next_input: str,
    k: int,
    seeds: Sequence[int],
    first_output: str | None = None,
    stop_token: str | None = None,
) -> list[list[Verdict]]:
    """
    Continue ``history`` for up to ``k`` steps and return each constraint's verdicts.

    The first step uses ``next_input`` (and ``first_output`` when given); later
    inputs are empty. A stop token from the model ends the continuation.
    """
    stop_token = settings.TRAC_STOP_TOKEN if stop_token is None else stop_token
    states = list(states)
    verdicts: list[list[Verdict]] = [[] for _ in states]
    steps = list(history)

    for j in range(k):
        input = next_input if j == 0 else ""
        if j == 0 and first_output is not None:
            output = first_output
        else:
            output = model.next_output(tuple(steps), input, sampling_params(seeds[j]))
        if output == stop_token:
            break
        record = StepRecord(t=len(steps) + 1, input=input, output=output)
        record = record.with_labels(label_step(labeler, (*steps, record)))
        steps.append(record)
        for index, state in enumerate(states):
            states[index], verdict = step(state, record.labels, record)
            verdicts[index].append(verdict)
    return verdicts


def estimate_risks(
    states: Sequence[MonitorState],
    model: BlackBoxModel,
    labeler: LabelingFunction,
    history: Sequence[StepRecord],
    next_input: str,
    pattern: MonitoringPattern | str = "contains_violated",
    k: int | None = None,
    m: int | None = None,
    seed: int = 0,
    current: Mapping[str, Verdict] | None = None,
    first_output: str | None = None,
    workers: int | None = None,
    call_budget: int | None = None,
    method: str = "sampling",
) -> dict[str, RiskEstimate]:
    """
    One RiskEstimate per monitor state, all from a shared set of m continuations.

    ``current`` overrides the leading verdict per constraint; reset-mode callers
    pass the verdict last reported, since a reset state no longer shows it.
    """
    if method == "direct":
        raise NotImplementedError("Direct risk prediction by the model is not implemented")
    if method not in METHODS:
        raise PredictionError(f"Unknown estimation method {method!r}")

    pattern = get_pattern(pattern) if isinstance(pattern, str) else pattern
    k = settings.TRAC_PREDICTIVE_HORIZON if k is None else k
    m = settings.TRAC_PREDICTIVE_SAMPLES if m is None else m
    workers = settings.TRAC_SAMPLING_WORKERS if workers is None else workers
    call_budget = settings.TRAC_SAMPLING_CALL_BUDGET if call_budget is None else call_budget
    if k < 1 or m < 1:
        raise PredictionError(f"Horizon and sample count must be positive (k={k}, m={m})")
    if m * k > call_budget:
        raise SamplingBudgetError(m * k, call_budget)

    states = list(states)
    t = len(history) + 1
    leading = [(current or {}).get(state.constraint_id, state.verdict) for state in states]

    def sample(s: int) -> list[list[Verdict]]:
        seeds = [derive_seed(seed, ESTIMATE, t, s, j) for j in range(k)]
        try:
            return rollout(states, model, labeler, history, next_input, k, seeds, first_output)
        except (ModelError, LabelingError) as exc:
            raise PredictionError(f"continuation {s} at step {t} failed: {exc}") from exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            continuations = list(pool.map(sample, range(m)))
    else:
        continuations = [sample(s) for s in range(m)]

    estimates = {}
    for index, state in enumerate(states):
        sequences = tuple((leading[index], *continuation[index]) for continuation in continuations)
        matches = sum(pattern(sequence) for sequence in sequences)
        estimates[state.constraint_id] = RiskEstimate(
            constraint_id=state.constraint_id,
            probability=matches / m,
            matches=matches,
            samples=m,
            horizon=k,
            sequences=sequences,
        )
    logger.debug(
        f"Risk at step {t}: "
        + ", ".join(f"{key}={estimate.probability:.3f}" for key, estimate in estimates.items())
    )
    return estimates


def estimate_risk(
    state: MonitorState,
    model: BlackBoxModel,
    labeler: LabelingFunction,
    pattern: MonitoringPattern | str,
    k: int,
    m: int,
    next_input: str,
    history: Sequence[StepRecord] = (),
    seed: int = 0,
    **options,
) -> RiskEstimate:
    """Single-constraint form of ``estimate_risks``."""
    estimates = estimate_risks([state], model, labeler, history, next_input, pattern, k, m, seed, **options)
    return estimates[state.constraint_id]
