"""
Histories, witnesses and verdict reports.
"""
from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field, replace
from typing import Any

from backend.apps.ltl.formula import Formula, TruthAssignment, Verdict
from backend.apps.ltl.rendering import render

from .exceptions import TraceFormatError


@dataclass(frozen=True)
class StepRecord:
    """One (input, output, labels) triple; ``input`` is empty for the ∅ input."""
    t: int
    input: str
    output: str
    labels: TruthAssignment | None = None

    def __post_init__(self) -> None:
        if self.labels is not None and not isinstance(self.labels, frozenset):
            object.__setattr__(self, "labels", frozenset(self.labels))

    def with_labels(self, labels: Iterable[str]) -> StepRecord:
        return replace(self, labels=frozenset(labels))

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"t": self.t, "input": self.input, "output": self.output}
        if self.labels is not None:
            data["labels"] = sorted(self.labels)
        return data


@dataclass(frozen=True)
class Trace:
    steps: tuple[StepRecord, ...] = ()
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))
        for index, step in enumerate(self.steps, start=1):
            if step.t != index:
                raise TraceFormatError(f"non-contiguous step index {step.t} at position {index}")

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[StepRecord]:
        return iter(self.steps)

    def __getitem__(self, index):
        return self.steps[index]

    @property
    def is_labeled(self) -> bool:
        return all(step.labels is not None for step in self.steps)

    def history(self, t: int) -> tuple[StepRecord, ...]:
        """Steps 1..t."""
        return self.steps[:t]

    def append(self, input: str, output: str, labels: Iterable[str] | None = None) -> Trace:
        step = StepRecord(
            t=len(self.steps) + 1,
            input=input,
            output=output,
            labels=frozenset(labels) if labels is not None else None,
        )
        return replace(self, steps=self.steps + (step,))

    @classmethod
    def from_labels(cls, assignments: Iterable[Iterable[str]], metadata: Mapping[str, Any] | None = None) -> Trace:
        """A trace whose outputs are the label sets themselves, for tests and synthetic runs."""
        steps = []
        for t, labels in enumerate(assignments, start=1):
            labels = frozenset(labels)
            steps.append(StepRecord(t=t, input="", output=" ".join(sorted(labels)), labels=labels))
        return cls(tuple(steps), dict(metadata or {}))


@dataclass(frozen=True)
class WitnessEntry:
    t: int
    input: str
    output: str
    labels: TruthAssignment
    residual: Formula

    def to_dict(self) -> dict[str, Any]:
        return {
            "t": self.t,
            "input": self.input,
            "output": self.output,
            "labels": sorted(self.labels),
            "residual": render(self.residual, "ascii"),
        }


Witness = tuple[WitnessEntry, ...]


@dataclass(frozen=True)
class VerdictReport:
    """Per-step verdicts of one constraint over one trace."""
    constraint_id: str
    verdicts: tuple[Verdict, ...]
    violations: int = 0
    satisfactions: int = 0
    witnesses: tuple[Witness, ...] = ()

    @property
    def has_violation(self) -> bool:
        return self.violations > 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "constraint_id": self.constraint_id,
            "verdicts": [verdict.value for verdict in self.verdicts],
            "violations": self.violations,
            "satisfactions": self.satisfactions,
            "witnesses": [[entry.to_dict() for entry in witness] for witness in self.witnesses],
        }
