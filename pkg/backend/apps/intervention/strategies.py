"""
The three intervention strategies.

Injection rewrites the input; resampling and substitution replace the output.
"""
import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path

from django.template import Context, Template
from django.template.loader import render_to_string

from backend.apps.adapters.blackbox import BlackBoxModel, SampleParams, sampling_params
from backend.apps.ltl.formula import Formula, Verdict
from backend.apps.ltl.rendering import render
from backend.apps.monitoring.engine import MonitorState
from backend.apps.predictive.estimator import RESAMPLE, derive_seed, rollout
from backend.apps.traces.labeling import LabelingFunction
from backend.apps.traces.records import StepRecord

logger = logging.getLogger(__name__)

INJECT_TEMPLATE = "prompts/constraint_guided.txt"
SAFER_MODEL_TEMPLATE = "prompts/safer_model.txt"


# CONSTRAINT-GUIDED PROMPTING


def apply_inject(input: str, residuals: Mapping[str, Formula], template_path: str | None = None) -> str:
    """Append the at-risk residuals, rendered in English, to the input."""
    if not residuals:
        return input
    context = {
        "input": input,
        "constraints": "\n".join(render(residuals[key], "english") for key in sorted(residuals)),
    }
    if template_path:
        template = Template(Path(template_path).read_text(encoding="utf-8"))
        return template.render(Context(context, autoescape=False)).rstrip("\n")
    return render_to_string(INJECT_TEMPLATE, context).rstrip("\n")


# MODEL SUBSTITUTION


def safer_model_prompt(history: Sequence[StepRecord], input: str, rules: Sequence[str]) -> str:
    return render_to_string(
        SAFER_MODEL_TEMPLATE,
        {"history": list(history), "input": input, "rules": "\n".join(rules)},
    )


def apply_switch(
    substitute: BlackBoxModel,
    history: Sequence[StepRecord],
    input: str,
    rules: Sequence[str],
    params: SampleParams,
) -> str:
    """Ask the substitute model for the next output; its reply is used verbatim."""
    return substitute.next_output((), safer_model_prompt(history, input, rules), params)


# BEST-OF-N RESAMPLING


@dataclass(frozen=True)
class ResampleResult:
    output: str
    index: int
    candidates: tuple[str, ...]
    scores: tuple[int, ...]


def predicted_violations(
    states: Sequence[MonitorState],
    model: BlackBoxModel,
    labeler: LabelingFunction,
    history: Sequence[StepRecord],
    input: str,
    candidate: str,
    k: int,
    seeds: Sequence[int],
) -> int:
    """Violated verdicts over the candidate step plus one k-1 step continuation, summed over constraints."""
    verdicts = rollout(states, model, labeler, history, input, k, seeds, first_output=candidate)
    return sum(sequence.count(Verdict.VIOLATED) for sequence in verdicts)


def apply_resample(
    states: Sequence[MonitorState],
    model: BlackBoxModel,
    labeler: LabelingFunction,
    history: Sequence[StepRecord],
    input: str,
    n: int,
    k: int,
    seed: int = 0,
) -> ResampleResult:
    """
    Draw up to ``n`` fresh outputs and keep the one with the fewest predicted
    violations; ties go to the earliest draw. Drawing stops at a candidate with
    no predicted violation.
    """
    t = len(history) + 1
    candidates: list[str] = []
    scores: list[int] = []
    for j in range(n):
        candidate = model.next_output(tuple(history), input, sampling_params(derive_seed(seed, RESAMPLE, t, j)))
        seeds = [derive_seed(seed, RESAMPLE, t, j, step) for step in range(k)]
        candidates.append(candidate)
        scores.append(predicted_violations(states, model, labeler, history, input, candidate, k, seeds))
        if scores[-1] == 0:
            break

    best = min(range(len(scores)), key=lambda index: (scores[index], index))
    logger.info(f"Resampling at step {t}: chose candidate {best + 1} of {len(candidates)} (scores {scores})")
    return ResampleResult(candidates[best], best, tuple(candidates), tuple(scores))
