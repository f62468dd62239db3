"""
Progression-based monitors: plain (absorbing) and reset mode.

Each constraint is progressed on its own state. A state is an immutable value;
``step`` returns the successor, so callers can branch copies freely.
"""
from __future__ import annotations

import logging
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, replace
from typing import Literal

from backend.apps.ltl.formula import Formula, TruthAssignment, Verdict
from backend.apps.ltl.parser import parse
from backend.apps.ltl.progression import advance, simplify, verdict_of
from backend.apps.traces.records import StepRecord, Trace, VerdictReport, Witness, WitnessEntry

from .exceptions import AuditDiscrepancyError, MissingLabelsError, MonitoringError

logger = logging.getLogger(__name__)

Mode = Literal["plain", "reset"]
MODES: tuple[str, ...] = ("plain", "reset")


@dataclass(frozen=True)
class Constraint:
    id: str
    formula: Formula
    gloss: str = ""

    @classmethod
    def from_text(cls, id: str, text: str, gloss: str = "") -> Constraint:
        return cls(id=id, formula=parse(text), gloss=gloss)


def as_constraints(constraints: Iterable[Constraint] | Mapping[str, Formula]) -> list[Constraint]:
    """Normalize to a list ordered by constraint id."""
    if isinstance(constraints, Mapping):
        items = [Constraint(id=key, formula=value) for key, value in constraints.items()]
    else:
        items = list(constraints)
    ids = [item.id for item in items]
    if len(set(ids)) != len(ids):
        raise MonitoringError(f"Duplicate constraint ids: {sorted(ids)}")
    return sorted(items, key=lambda item: item.id)


# MONITOR STATE


@dataclass(frozen=True)
class MonitorState:
    constraint_id: str
    formula: Formula
    residual: Formula
    witness: Witness = ()
    reset: bool = False
    violations: int = 0
    satisfactions: int = 0
    archived: tuple[Witness, ...] = ()

    @classmethod
    def initial(cls, constraint: Constraint, reset: bool = False) -> MonitorState:
        return cls(
            constraint_id=constraint.id,
            formula=constraint.formula,
            residual=simplify(constraint.formula),
            reset=reset,
        )

    @property
    def verdict(self) -> Verdict:
        return verdict_of(self.residual)

    @property
    def witnesses(self) -> tuple[Witness, ...]:
        """Archived episodes, plus the open witness once a plain monitor is terminal."""
        if not self.reset and self.verdict.is_terminal:
            return (self.witness,)
        return self.archived


def step(state: MonitorState, labels: TruthAssignment, step_context: StepRecord) -> tuple[MonitorState, Verdict]:
    """Progress one constraint through one labeled step."""
    labels = frozenset(labels)

    if not state.reset and state.verdict.is_terminal:
        verdict = state.verdict
        return _count(state, verdict), verdict

    residual = advance(state.residual, labels)
    witness = state.witness
    if residual != state.residual:
        entry = WitnessEntry(
            t=step_context.t,
            input=step_context.input,
            output=step_context.output,
            labels=labels,
            residual=residual,
        )
        witness = witness + (entry,)

    verdict = verdict_of(residual)
    state = _count(replace(state, residual=residual, witness=witness), verdict)

    if verdict.is_terminal:
        logger.debug(f"Constraint {state.constraint_id} {verdict.value} at step {step_context.t}")
        if state.reset:
            state = replace(
                state,
                residual=simplify(state.formula),
                witness=(),
                archived=state.archived + (witness,),
            )
    return state, verdict


def _count(state: MonitorState, verdict: Verdict) -> MonitorState:
    if verdict is Verdict.VIOLATED:
        return replace(state, violations=state.violations + 1)
    if verdict is Verdict.SATISFIED:
        return replace(state, satisfactions=state.satisfactions + 1)
    return state


# MULTI-CONSTRAINT MONITOR


class Monitor:
    """Independent monitor states for a set of constraints over one session."""

    def __init__(self, constraints: Iterable[Constraint] | Mapping[str, Formula], mode: Mode = "plain"):
        if mode not in MODES:
            raise MonitoringError(f"Unknown monitor mode: {mode!r}")
        self.mode = mode
        self.constraints = as_constraints(constraints)
        self.states = {
            constraint.id: MonitorState.initial(constraint, reset=mode == "reset")
            for constraint in self.constraints
        }
        self.verdicts: dict[str, list[Verdict]] = {constraint.id: [] for constraint in self.constraints}

    def observe(self, record: StepRecord) -> dict[str, Verdict]:
        if record.labels is None:
            raise MissingLabelsError(record.t)
        current = {}
        for constraint_id, state in self.states.items():
            self.states[constraint_id], current[constraint_id] = step(state, record.labels, record)
            self.verdicts[constraint_id].append(current[constraint_id])
        return current

    def reports(self) -> list[VerdictReport]:
        return [
            VerdictReport(
                constraint_id=constraint_id,
                verdicts=tuple(self.verdicts[constraint_id]),
                violations=state.violations,
                satisfactions=state.satisfactions,
                witnesses=state.witnesses,
            )
            for constraint_id, state in self.states.items()
        ]


def _require_labels(trace: Trace) -> None:
    for record in trace:
        if record.labels is None:
            raise MissingLabelsError(record.t)


def run_monitor(
    trace: Trace,
    constraints: Iterable[Constraint] | Mapping[str, Formula],
    mode: Mode = "plain",
) -> list[VerdictReport]:
    """One report per constraint, ordered by constraint id."""
    _require_labels(trace)
    monitor = Monitor(constraints, mode)
    for record in trace:
        monitor.observe(record)
    return monitor.reports()


def run_online(
    steps: Iterable[StepRecord],
    constraints: Iterable[Constraint] | Mapping[str, Formula],
    mode: Mode = "plain",
) -> Iterator[tuple[StepRecord, dict[str, Verdict]]]:
    """Yield each step with its per-constraint verdicts as soon as it is observed."""
    monitor = Monitor(constraints, mode)
    for record in steps:
        yield record, monitor.observe(record)


def audit_log(
    trace: Trace,
    constraints: Iterable[Constraint] | Mapping[str, Formula],
    mode: Mode = "plain",
    cross_check: bool = False,
) -> list[VerdictReport]:
    """
    Audit a complete log.

    With ``cross_check`` every prefix is re-monitored from scratch and its last
    verdict compared with the incremental one.
    """
    if not len(trace):
        raise MonitoringError("Cannot audit an empty trace")
    constraints = as_constraints(constraints)
    reports = run_monitor(trace, constraints, mode)

    if cross_check:
        discrepancies = []
        for t in range(1, len(trace) + 1):
            prefix = Trace(trace.history(t))
            for incremental, recomputed in zip(reports, run_monitor(prefix, constraints, mode), strict=True):
                if incremental.verdicts[t - 1] is not recomputed.verdicts[-1]:
                    discrepancies.append((incremental.constraint_id, t))
        if discrepancies:
            raise AuditDiscrepancyError(discrepancies)
        logger.info(f"Cross-check passed over {len(trace)} prefixes")

    return reports
