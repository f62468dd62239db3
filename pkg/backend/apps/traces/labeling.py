"""
The labeling-function contract shared by every monitor.
"""
import logging
from collections.abc import Sequence
from dataclasses import replace
from typing import Protocol, runtime_checkable

from backend.apps.ltl.formula import TruthAssignment

from .exceptions import LabelingError
from .records import StepRecord, Trace

logger = logging.getLogger(__name__)


@runtime_checkable
class LabelingFunction(Protocol):
    """Maps the history through step t to the propositions true at t."""

    vocabulary: frozenset[str]

    def label(self, history: Sequence[StepRecord]) -> TruthAssignment: ...


def label_step(labeler: LabelingFunction, history: Sequence[StepRecord]) -> TruthAssignment:
    """Label the last step of ``history``, enforcing the declared vocabulary."""
    t = history[-1].t if history else 0
    try:
        labels = frozenset(labeler.label(history))
    except LabelingError:
        raise
    except Exception as exc:
        raise LabelingError(t, f"{type(exc).__name__}: {exc}") from exc

    undeclared = labels - labeler.vocabulary
    if undeclared:
        raise LabelingError(t, f"undeclared proposition {', '.join(sorted(undeclared))}")
    return labels


def apply_labeler(trace: Trace, labeler: LabelingFunction, overwrite: bool = False) -> Trace:
    """
    Return a copy of ``trace`` with labels at every step.

    Existing labels are kept unless ``overwrite`` is set. Steps are labeled in
    order; each call sees the history with the labels assigned so far.
    """
    labeled: list[StepRecord] = []
    for step in trace:
        if step.labels is not None and not overwrite:
            labeled.append(step)
            continue
        history = (*labeled, step)
        labeled.append(step.with_labels(label_step(labeler, history)))

    logger.debug(f"Labeled {len(labeled)} steps with {type(labeler).__name__}")
    return replace(trace, steps=tuple(labeled))
