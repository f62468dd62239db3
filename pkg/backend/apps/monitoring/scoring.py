"""
Event-level precision, recall and F1 between two sets of verdict reports.

An event is a (step, constraint, terminal verdict) triple; an event matches
only if all three agree.
"""
from collections.abc import Sequence
from dataclasses import dataclass

from backend.apps.traces.records import VerdictReport

from .exceptions import ReportShapeError

Event = tuple[int, str, str]


@dataclass(frozen=True)
class F1Score:
    precision: float
    recall: float
    f1: float
    true_positives: int
    false_positives: int
    false_negatives: int

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "F1Score":
        predicted = tp + fp
        actual = tp + fn
        if predicted == 0 and actual == 0:
            return cls(1.0, 1.0, 1.0, tp, fp, fn)
        precision = tp / predicted if predicted else 0.0
        recall = tp / actual if actual else 0.0
        total = precision + recall
        f1 = 2 * precision * recall / total if total else 0.0
        return cls(precision, recall, f1, tp, fp, fn)

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "tp": self.true_positives,
            "fp": self.false_positives,
            "fn": self.false_negatives,
        }


@dataclass(frozen=True)
class ScoreBoard:
    per_constraint: dict[str, F1Score]
    pooled: F1Score

    def to_dict(self) -> dict:
        return {
            "per_constraint": {key: score.to_dict() for key, score in self.per_constraint.items()},
            "pooled": self.pooled.to_dict(),
        }


def events(report: VerdictReport) -> set[Event]:
    return {
        (t, report.constraint_id, verdict.value)
        for t, verdict in enumerate(report.verdicts, start=1)
        if verdict.is_terminal
    }


def score_f1(predicted: Sequence[VerdictReport], truth: Sequence[VerdictReport]) -> ScoreBoard:
    predicted_by_id = {report.constraint_id: report for report in predicted}
    truth_by_id = {report.constraint_id: report for report in truth}
    if set(predicted_by_id) != set(truth_by_id):
        raise ReportShapeError(
            f"Constraint ids differ: predicted {sorted(predicted_by_id)}, truth {sorted(truth_by_id)}"
        )

    per_constraint = {}
    totals = [0, 0, 0]
    for constraint_id in sorted(truth_by_id):
        guess, actual = predicted_by_id[constraint_id], truth_by_id[constraint_id]
        if len(guess.verdicts) != len(actual.verdicts):
            raise ReportShapeError(
                f"Constraint {constraint_id}: {len(guess.verdicts)} predicted steps vs {len(actual.verdicts)}"
            )
        guessed, expected = events(guess), events(actual)
        counts = (len(guessed & expected), len(guessed - expected), len(expected - guessed))
        per_constraint[constraint_id] = F1Score.from_counts(*counts)
        totals = [total + count for total, count in zip(totals, counts, strict=True)]

    return ScoreBoard(per_constraint=per_constraint, pooled=F1Score.from_counts(*totals))
