"""
LLM-as-a-judge auditor baseline.

The judge receives the rules in natural language and the numbered action list,
and answers one line per action ("Action N: VIOLATION: Rule X" or
"Action N: COMPLIANT"). Its answers are turned into verdict reports so they
can be scored against monitor output with ``score_f1``.
"""
import logging
import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from django.conf import settings
from django.template.loader import render_to_string

from backend.apps.adapters.blackbox import BlackBoxModel, SampleParams
from backend.apps.ltl.formula import Formula, Verdict
from backend.apps.ltl.rendering import render
from backend.apps.traces.records import Trace, VerdictReport

from .engine import Constraint, as_constraints

logger = logging.getLogger(__name__)

ACTION_RE = re.compile(r"Action\s*\[?(\d+)\]?\s*:(.*)", re.IGNORECASE)
VIOLATION_RE = re.compile(r"VIOLATION\s*:?\s*Rule\s*(\d+)", re.IGNORECASE)


@dataclass(frozen=True)
class JudgeAudit:
    reports: list[VerdictReport]
    # action numbers the reply did not mention
    unanswered: tuple[int, ...]
    reply: str


def rule_text(constraint: Constraint) -> str:
    return constraint.gloss or render(constraint.formula, "english")


def auditor_prompt(trace: Trace, constraints: list[Constraint], with_labels: bool = False) -> str:
    if with_labels and not trace.is_labeled:
        raise ValueError("The labels oracle needs a labeled trace")
    return render_to_string(
        "prompts/auditor_zero_shot.txt",
        {
            "rules": [rule_text(constraint) for constraint in constraints],
            "with_labels": with_labels,
            "trace": [
                {
                    "t": record.t,
                    "output": record.output,
                    "oracle": ", ".join(sorted(record.labels or ())) or "none",
                }
                for record in trace
            ],
        },
    )


def parse_auditor_reply(reply: str, constraints: list[Constraint], steps: int) -> tuple[list[VerdictReport], tuple[int, ...]]:
    flagged: dict[str, set[int]] = {constraint.id: set() for constraint in constraints}
    answered = set()
    for line in reply.splitlines():
        match = ACTION_RE.search(line)
        if not match:
            continue
        t = int(match.group(1))
        if not 1 <= t <= steps:
            continue
        answered.add(t)
        for rule in VIOLATION_RE.findall(match.group(2)):
            index = int(rule) - 1
            if 0 <= index < len(constraints):
                flagged[constraints[index].id].add(t)

    reports = []
    for constraint in constraints:
        verdicts = tuple(
            Verdict.VIOLATED if t in flagged[constraint.id] else Verdict.INCONCLUSIVE
            for t in range(1, steps + 1)
        )
        reports.append(
            VerdictReport(
                constraint_id=constraint.id,
                verdicts=verdicts,
                violations=len(flagged[constraint.id]),
            )
        )
    unanswered = tuple(t for t in range(1, steps + 1) if t not in answered)
    return reports, unanswered


def judge_audit(
    trace: Trace,
    constraints: Iterable[Constraint] | Mapping[str, Formula],
    judge: BlackBoxModel,
    with_labels: bool = False,
    seed: int | None = None,
) -> JudgeAudit:
    """Audit a complete log with a judge model instead of progression."""
    constraints = as_constraints(constraints)
    prompt = auditor_prompt(trace, constraints, with_labels)
    reply = judge.next_output((), prompt, SampleParams(temperature=settings.TRAC_JUDGE_TEMPERATURE, seed=seed))
    reports, unanswered = parse_auditor_reply(reply, constraints, len(trace))
    if unanswered:
        logger.warning(f"Judge reply left {len(unanswered)} of {len(trace)} actions unanswered")
    return JudgeAudit(reports=reports, unanswered=unanswered, reply=reply)
