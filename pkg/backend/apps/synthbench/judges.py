"""
Judging synthetic cases with a model, and the two reference judges.

A judge reads the prompt (constraint wording followed by the step lines) and
answers VALID or INVALID, once per constraint in the multi-constraint style.
Replies are parsed leniently; a missing or unreadable answer counts as wrong
and is tallied as a parse failure.
"""
import logging
import re
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings
from django.template.loader import render_to_string

from backend.apps.adapters.accuracy import AccuracyEstimate
from backend.apps.adapters.blackbox import BlackBoxModel, SampleParams
from backend.apps.ltl.formula import Formula, Verdict
from backend.apps.ltl.semantics import evaluate_finite
from backend.apps.monitoring.engine import run_monitor
from backend.apps.predictive.estimator import derive_seed
from backend.apps.traces.records import StepRecord, Trace

from .exceptions import KnobError
from .generators import BenchCase
from .patterns import LEVELS, render_constraint

logger = logging.getLogger(__name__)

PROMPT_STYLES = ("auto", "single", "multi", "entities")
PROMPT_TEMPLATES = {
    "single": "prompts/judge_single.txt",
    "multi": "prompts/judge_multi.txt",
    "entities": "prompts/judge_entities.txt",
}

VERDICT_RE = re.compile(r"\b(INVALID|VALID)\b", re.IGNORECASE)
CONSTRAINT_LINE_RE = re.compile(r"Constraint\s*(\d+)\s*[:=-]\s*[*`]*\s*(INVALID|VALID)\b", re.IGNORECASE)
PROMPT_CONSTRAINT_RE = re.compile(r"^Constraint (\d+): The trace is VALID for this constraint", re.MULTILINE)


# PROMPTS AND REPLIES


def resolve_style(case: BenchCase, style: str = "auto") -> str:
    if style not in PROMPT_STYLES:
        raise KnobError("prompt_style", style, f"expected one of {', '.join(PROMPT_STYLES)}")
    if style == "auto":
        if len(case.constraints) > 1:
            return "multi"
        return "entities" if case.entities > 1 else "single"
    if style != "multi" and len(case.constraints) > 1:
        raise KnobError("prompt_style", style, f"case {case.id} has {len(case.constraints)} constraints")
    return style


def judge_prompt(case: BenchCase, style: str = "auto", level: str = "informal") -> str:
    style = resolve_style(case, style)
    if level not in LEVELS:
        raise KnobError("level", level, f"expected one of {', '.join(LEVELS)}")
    texts = [render_constraint(phi, level) for phi in case.constraints]
    context = {
        "trace": list(case.trace),
        "constraint": texts[0],
        "constraints": texts,
        "entities": case.entities,
        "entity_indices": range(1, case.entities + 1),
    }
    return render_to_string(PROMPT_TEMPLATES[style], context)


def parse_judgment(reply: str, constraints: int, style: str) -> list[bool | None]:
    """One answer per constraint (True for VALID); None where the reply gives none."""
    if style == "multi":
        answers: list[bool | None] = [None] * constraints
        for number, word in CONSTRAINT_LINE_RE.findall(reply):
            index = int(number) - 1
            if 0 <= index < constraints and answers[index] is None:
                answers[index] = word.upper() == "VALID"
        return answers
    words = VERDICT_RE.findall(reply)
    if not words:
        return [None] * constraints
    # the final word is the answer when a reply restates the options first
    return [words[-1].upper() == "VALID"] * constraints


def _reply(answers: Sequence[bool], style: str) -> str:
    if style == "multi":
        return "\n".join(
            f"Constraint {index}: {'VALID' if answer else 'INVALID'}"
            for index, answer in enumerate(answers, start=1)
        )
    return "VALID" if answers[0] else "INVALID"


# REFERENCE JUDGES


def monitor_truth(phi: Formula, trace: Trace) -> bool:
    """
    Judge a complete trace with the monitor; a trace that ends Inconclusive is
    decided by finite-trace semantics.
    """
    (report,) = run_monitor(trace, {"constraint": phi}, "plain")
    final = report.verdicts[-1]
    if final is Verdict.INCONCLUSIVE:
        return evaluate_finite(phi, [step.labels for step in trace])
    return final is Verdict.SATISFIED


class MonitorOracleJudge:
    """
    Answers the prompts of known cases by running the monitor on their labels.

    It recognizes only prompts rendered for ``cases`` with the same style and
    level; anything else gets an empty reply.
    """

    def __init__(self, cases: Iterable[BenchCase], prompt_style: str = "auto", level: str = "informal"):
        self.replies = {}
        for case in cases:
            style = resolve_style(case, prompt_style)
            answers = [monitor_truth(phi, case.trace) for phi in case.constraints]
            self.replies[judge_prompt(case, style, level)] = _reply(answers, style)

    def next_output(self, history: Sequence[StepRecord], input: str, params: SampleParams) -> str:
        return self.replies.get(input, "")


class CoinFlipJudge:
    """Uniformly random answers, seeded per call."""

    def __init__(self, seed: int = 0):
        self.seed = seed

    def next_output(self, history: Sequence[StepRecord], input: str, params: SampleParams) -> str:
        entropy = [self.seed] if params.seed is None else [self.seed, params.seed]
        rng = np.random.default_rng(entropy)
        numbers = PROMPT_CONSTRAINT_RE.findall(input)
        if numbers:
            return _reply(list(rng.random(len(numbers)) < 0.5), "multi")
        return _reply([bool(rng.random() < 0.5)], "single")


# EVALUATION


@dataclass(frozen=True)
class JudgeEvaluation:
    groups: dict[str, AccuracyEstimate]
    overall: AccuracyEstimate
    parse_failures: int
    prompt_style: str
    level: str
    # per case: (case id, answers, truth)
    answers: list[tuple[str, tuple[bool | None, ...], tuple[bool, ...]]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "prompt_style": self.prompt_style,
            "level": self.level,
            "overall": self.overall.to_dict(),
            "parse_failures": self.parse_failures,
            "groups": {key: estimate.to_dict() for key, estimate in sorted(self.groups.items())},
            "cases": [
                {"id": case_id, "answers": list(answers), "truth": list(truth)}
                for case_id, answers, truth in self.answers
            ],
        }


def eval_judge(
    bench: Sequence[BenchCase],
    judge: BlackBoxModel,
    prompt_style: str = "auto",
    level: str = "informal",
    seed: int = 0,
) -> JudgeEvaluation:
    """Accuracy of ``judge`` against construction truth, per knob setting."""
    correct: dict[str, int] = defaultdict(int)
    total: dict[str, int] = defaultdict(int)
    failures = 0
    answers_log = []

    for index, case in enumerate(bench):
        style = resolve_style(case, prompt_style)
        prompt = judge_prompt(case, style, level)
        params = SampleParams(temperature=settings.TRAC_JUDGE_TEMPERATURE, seed=derive_seed(seed, index))
        reply = judge.next_output((), prompt, params)
        answers = parse_judgment(reply, len(case.constraints), style)

        missing = sum(answer is None for answer in answers)
        if missing:
            logger.warning(f"Case {case.id}: {missing} of {len(answers)} answers missing from the judge reply")
            failures += missing
        for answer, truth in zip(answers, case.truth, strict=True):
            correct[case.group] += answer == truth
            total[case.group] += 1
        answers_log.append((case.id, tuple(answers), case.truth))

    groups = {key: AccuracyEstimate(correct[key], total[key]) for key in total}
    overall = AccuracyEstimate(sum(correct.values()), sum(total.values()))
    logger.info(f"Judge accuracy {overall.accuracy:.3f} ± {overall.half_width:.3f} over {overall.total} judgments ({failures} unparsed)")
    return JudgeEvaluation(groups, overall, failures, prompt_style, level, answers_log)
