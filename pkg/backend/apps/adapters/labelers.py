"""
Labeling functions: deterministic rules, the synthetic attribute extractor,
embedded ground truth and an endpoint-backed labeler.
"""
import logging
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from django.conf import settings
from django.template.loader import render_to_string

from backend.apps.ltl.formula import PROPOSITION_RE, RESERVED_NAMES, TruthAssignment
from backend.apps.synthbench.events import Vocabulary, default_vocabulary, parse_step
from backend.apps.traces.records import StepRecord

from .blackbox import BlackBoxModel, SampleParams

logger = logging.getLogger(__name__)

FIELDS = ("output", "input", "both")


def _check_names(names: Iterable[str]) -> frozenset[str]:
    names = frozenset(names)
    invalid = sorted(name for name in names if not PROPOSITION_RE.match(name) or name in RESERVED_NAMES)
    if invalid:
        raise ValueError(f"Invalid proposition names: {', '.join(invalid)}")
    return names


# RULE LABELER


@dataclass(frozen=True)
class Rule:
    proposition: str
    pattern: re.Pattern
    field: str = "output"

    def matches(self, step: StepRecord) -> bool:
        if self.field == "both":
            return bool(self.pattern.search(step.input) or self.pattern.search(step.output))
        return bool(self.pattern.search(getattr(step, self.field)))


class RuleLabeler:
    """
    One regular expression per proposition, searched in the latest step.

    A rule may be a plain pattern string, or a mapping with ``pattern`` and
    optional ``field`` (output, input or both) and ``ignore_case`` keys.
    """

    def __init__(self, rules: Mapping[str, str | Mapping], ignore_case: bool = False):
        self.rules: list[Rule] = []
        for proposition, spec in sorted(rules.items()):
            if isinstance(spec, str):
                spec = {"pattern": spec}
            field = spec.get("field", "output")
            if field not in FIELDS:
                raise ValueError(f"Rule {proposition}: unknown field {field!r}")
            flags = re.IGNORECASE if spec.get("ignore_case", ignore_case) else 0
            self.rules.append(Rule(proposition, re.compile(spec["pattern"], flags), field))
        self.vocabulary = _check_names(rule.proposition for rule in self.rules)

    def label(self, history: Sequence[StepRecord]) -> TruthAssignment:
        step = history[-1]
        return frozenset(rule.proposition for rule in self.rules if rule.matches(step))


# SYNTHETIC-DOMAIN LABELERS


class AttributeLabeler:
    """Extracts animal/shape/color/number propositions from synthetic step lines."""

    def __init__(self, entities: int = 1, vocabulary: Vocabulary | None = None):
        if entities < 1:
            raise ValueError("entities must be at least 1")
        self.entities = entities
        self.words = vocabulary or default_vocabulary()
        self.vocabulary = self.words.propositions(entities)

    def label(self, history: Sequence[StepRecord]) -> TruthAssignment:
        events = parse_step(history[-1].output, self.words)
        tagged = self.entities > 1
        return frozenset().union(*(event.labels(tagged) for event in events))


class EmbeddedLabeler:
    """Returns the labels a trace already carries, e.g. construction-time ground truth."""

    def __init__(self, vocabulary: Iterable[str]):
        self.vocabulary = _check_names(vocabulary)

    @classmethod
    def for_steps(cls, steps: Iterable[StepRecord]) -> "EmbeddedLabeler":
        return cls(frozenset().union(*(step.labels or frozenset() for step in steps)))

    def label(self, history: Sequence[StepRecord]) -> TruthAssignment:
        step = history[-1]
        if step.labels is None:
            raise ValueError(f"step {step.t} carries no embedded labels")
        return step.labels


# ENDPOINT LABELER

ANSWER_RE = re.compile(r"^\s*[-*]*\s*[*`]*([A-Za-z0-9_]+)[*`]*\s*[:=-]\s*[*`]*\s*(yes|no|true|false)\b", re.IGNORECASE)


@dataclass(frozen=True)
class LabelWarning:
    t: int
    proposition: str
    reason: str


class EndpointLabeler:
    """
    Asks a model about every proposition of a step in one request.

    The reply is read line by line as ``<proposition>: yes|no``. A proposition
    without a readable answer is treated as absent and recorded in ``warnings``.
    Histories longer than the character budget are cut to a tail window; the
    affected steps are recorded in ``truncations``.
    """

    def __init__(
        self,
        model: BlackBoxModel,
        vocabulary: Iterable[str],
        descriptions: Mapping[str, str] | None = None,
        template: str = "prompts/labeling.txt",
        context_chars: int | None = None,
        temperature: float | None = None,
    ):
        self.model = model
        self.vocabulary = _check_names(vocabulary)
        self.descriptions = dict(descriptions or {})
        self.template = template
        self.context_chars = settings.TRAC_LABELER_CONTEXT_CHARS if context_chars is None else context_chars
        self.temperature = settings.TRAC_JUDGE_TEMPERATURE if temperature is None else temperature
        self.warnings: list[LabelWarning] = []
        self.truncations: list[int] = []

    def window(self, history: Sequence[StepRecord]) -> tuple[list[StepRecord], bool]:
        """Earlier steps that fit the character budget, newest kept first."""
        earlier = list(history[:-1])
        kept: list[StepRecord] = []
        used = 0
        for step in reversed(earlier):
            used += len(step.input) + len(step.output)
            if used > self.context_chars:
                break
            kept.append(step)
        kept.reverse()
        return kept, len(kept) < len(earlier)

    def prompt(self, history: Sequence[StepRecord]) -> str:
        context, truncated = self.window(history)
        if truncated:
            t = history[-1].t
            self.truncations.append(t)
            logger.warning(f"Labeling context truncated at step {t}: kept {len(context)} of {len(history) - 1} earlier steps")
        return render_to_string(
            self.template,
            {
                "context": context,
                "truncated": truncated,
                "step": history[-1],
                "propositions": [
                    {"name": name, "description": self.descriptions.get(name, name.replace("_", " "))}
                    for name in sorted(self.vocabulary)
                ],
            },
        )

    def parse(self, reply: str, t: int) -> TruthAssignment:
        by_lower = {name.lower(): name for name in self.vocabulary}
        answers: dict[str, bool] = {}
        for line in reply.splitlines():
            match = ANSWER_RE.match(line)
            if not match:
                continue
            name = by_lower.get(match.group(1).lower())
            if name is not None and name not in answers:
                answers[name] = match.group(2).lower() in ("yes", "true")

        for name in sorted(self.vocabulary - answers.keys()):
            self.warnings.append(LabelWarning(t, name, "no readable answer"))
            logger.warning(f"Labeler reply at step {t} has no readable answer for {name}; treating it as absent")
        return frozenset(name for name, present in answers.items() if present)

    def label(self, history: Sequence[StepRecord]) -> TruthAssignment:
        reply = self.model.next_output((), self.prompt(history), SampleParams(temperature=self.temperature))
        return self.parse(reply, history[-1].t)
