"""
Labeler accuracy against embedded ground truth.
"""
import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass, replace

from backend.apps.traces.labeling import LabelingFunction, label_step
from backend.apps.traces.records import Trace

from .exceptions import MissingGroundTruthError

logger = logging.getLogger(__name__)

Z_95 = 1.96


@dataclass(frozen=True)
class AccuracyEstimate:
    correct: int
    total: int

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    @property
    def half_width(self) -> float:
        """95% half-width from the standard error of the mean."""
        if not self.total:
            return 0.0
        p = self.accuracy
        return Z_95 * math.sqrt(p * (1 - p) / self.total)

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "half_width": self.half_width,
            "correct": self.correct,
            "total": self.total,
        }


@dataclass(frozen=True)
class LabelerAccuracy:
    per_proposition: dict[str, AccuracyEstimate]
    overall: AccuracyEstimate

    def to_dict(self) -> dict:
        return {
            "per_proposition": {name: estimate.to_dict() for name, estimate in self.per_proposition.items()},
            "overall": self.overall.to_dict(),
        }


def measure_labeler_accuracy(
    labeler: LabelingFunction,
    corpus: Trace | Iterable[Trace],
    propositions: Iterable[str] | None = None,
) -> LabelerAccuracy:
    """
    Score every (step, proposition) decision of ``labeler`` against the labels
    embedded in ``corpus``. The labeler sees histories with labels removed.
    """
    traces = [corpus] if isinstance(corpus, Trace) else list(corpus)
    names = sorted(propositions if propositions is not None else labeler.vocabulary)
    correct = dict.fromkeys(names, 0)
    total = 0

    for trace in traces:
        if not trace.is_labeled:
            missing = next(step.t for step in trace if step.labels is None)
            raise MissingGroundTruthError(f"Step {missing} has no ground-truth labels")
        blind = tuple(replace(step, labels=None) for step in trace)
        for index, step in enumerate(trace):
            predicted = label_step(labeler, blind[: index + 1])
            for name in names:
                correct[name] += (name in predicted) == (name in step.labels)
            total += 1

    if not total or not names:
        raise MissingGroundTruthError("Corpus has no labeled decisions to score")

    per_proposition = {name: AccuracyEstimate(correct[name], total) for name in names}
    overall = AccuracyEstimate(sum(correct.values()), total * len(names))
    logger.info(f"Labeler accuracy {overall.accuracy:.3f} ± {overall.half_width:.3f} over {overall.total} decisions")
    return LabelerAccuracy(per_proposition=per_proposition, overall=overall)
