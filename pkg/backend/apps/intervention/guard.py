"""
The guarded closed loop: predict, intervene, then monitor the final pair.

Each step follows the same order: estimate the risk of the coming steps, obtain
the model's output, intervene when any constraint's risk reaches the threshold,
and run the monitors on the (possibly rewritten) input/output pair.
"""
from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from typing import Any

from django.conf import settings

from backend.apps.adapters.blackbox import BlackBoxModel, action_params
from backend.apps.adapters.exceptions import ModelError
from backend.apps.ltl.formula import Formula, Verdict
from backend.apps.ltl.rendering import render
from backend.apps.monitoring.engine import Constraint, Mode, Monitor, MonitorState, as_constraints, step
from backend.apps.predictive.estimator import ACTION, CONTRACT, RiskEstimate, derive_seed, estimate_risks
from backend.apps.predictive.exceptions import PredictionError
from backend.apps.traces.exceptions import LabelingError
from backend.apps.traces.labeling import LabelingFunction, label_step
from backend.apps.traces.records import StepRecord, Trace, VerdictReport

from .exceptions import GuardStepError, PolicyError
from .policy import InterventionPolicy
from .strategies import apply_inject, apply_resample, apply_switch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScriptedInputs:
    """Inputs for the first steps; every later input is empty."""
    inputs: tuple[str, ...] = ()

    def at(self, t: int) -> str:
        return self.inputs[t - 1] if t <= len(self.inputs) else ""


@dataclass(frozen=True)
class GuardedStepOutcome:
    t: int
    input: str
    final_input: str
    original_output: str
    final_output: str
    intervened: bool
    strategy: str
    risks: Mapping[str, RiskEstimate] = field(default_factory=dict)
    risk_before: Mapping[str, float] = field(default_factory=dict)
    risk_after: Mapping[str, float] = field(default_factory=dict)
    # None when no intervention happened
    contract_held: bool | None = None
    verdicts: Mapping[str, Verdict] = field(default_factory=dict)
    residuals: Mapping[str, Formula] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.intervened and (self.final_output != self.original_output or self.final_input != self.input):
            raise ValueError("A step without intervention must keep the original input and output")

    def to_dict(self) -> dict[str, Any]:
        return {
            "t": self.t,
            "input": self.input,
            "final_input": self.final_input,
            "original_output": self.original_output,
            "final_output": self.final_output,
            "intervened": self.intervened,
            "strategy": self.strategy,
            "risks": [
                {**estimate.to_dict(), "intervened": self.intervened}
                for _, estimate in sorted(self.risks.items())
            ],
            "risk_before": dict(sorted(self.risk_before.items())),
            "risk_after": dict(sorted(self.risk_after.items())),
            "contract_held": self.contract_held,
            "verdicts": {key: verdict.value for key, verdict in sorted(self.verdicts.items())},
            "residuals": {key: render(residual) for key, residual in sorted(self.residuals.items())},
        }


# SESSION


@dataclass(frozen=True)
class GuardSession:
    constraints: tuple[Constraint, ...]
    policy: InterventionPolicy
    model: BlackBoxModel
    labeler: LabelingFunction
    substitute: BlackBoxModel | None = None
    mode: Mode = "reset"
    seed: int = 0
    history: Trace = field(default_factory=Trace)
    states: Mapping[str, MonitorState] = field(default_factory=dict)
    verdicts: Mapping[str, tuple[Verdict, ...]] = field(default_factory=dict)

    @classmethod
    def start(
        cls,
        constraints: Iterable[Constraint] | Mapping[str, Formula],
        policy: InterventionPolicy,
        model: BlackBoxModel,
        labeler: LabelingFunction,
        substitute: BlackBoxModel | None = None,
        mode: Mode = "reset",
        seed: int = 0,
    ) -> GuardSession:
        if policy.strategy == "switch" and substitute is None:
            raise PolicyError("Strategy switch needs a substitute model")
        monitor = Monitor(constraints, mode)
        return cls(
            constraints=tuple(monitor.constraints),
            policy=policy,
            model=model,
            labeler=labeler,
            substitute=substitute,
            mode=mode,
            seed=seed,
            states=dict(monitor.states),
            verdicts={constraint.id: () for constraint in monitor.constraints},
        )

    @property
    def t(self) -> int:
        """Index of the next step."""
        return len(self.history) + 1

    def last_verdicts(self) -> dict[str, Verdict]:
        return {key: verdicts[-1] for key, verdicts in self.verdicts.items() if verdicts}

    def rules(self) -> list[str]:
        return [constraint.gloss or render(constraint.formula, "english") for constraint in self.constraints]

    def reports(self) -> list[VerdictReport]:
        return [
            VerdictReport(
                constraint_id=key,
                verdicts=self.verdicts[key],
                violations=state.violations,
                satisfactions=state.satisfactions,
                witnesses=state.witnesses,
            )
            for key, state in self.states.items()
        ]


# GUARDED STEP


def _estimate(session: GuardSession, input: str, first_output: str | None = None, seed: int | None = None) -> dict[str, RiskEstimate]:
    policy = session.policy
    return estimate_risks(
        list(session.states.values()),
        session.model,
        session.labeler,
        session.history.steps,
        input,
        policy.pattern,
        k=policy.k,
        m=policy.m,
        seed=session.seed if seed is None else seed,
        current=session.last_verdicts(),
        first_output=first_output,
    )


def _monitor(session: GuardSession, input: str, output: str) -> tuple[GuardSession, dict[str, Verdict]]:
    record = StepRecord(t=session.t, input=input, output=output)
    record = record.with_labels(label_step(session.labeler, (*session.history.steps, record)))
    states = dict(session.states)
    current = {}
    for key, state in session.states.items():
        states[key], current[key] = step(state, record.labels, record)
    verdicts = {key: session.verdicts[key] + (current[key],) for key in session.verdicts}
    history = replace(session.history, steps=session.history.steps + (record,))
    return replace(session, history=history, states=states, verdicts=verdicts), current


def _guard_step(session: GuardSession, input: str) -> tuple[GuardSession, GuardedStepOutcome | None]:
    policy = session.policy
    t = session.t
    history = session.history.steps
    stop_token = getattr(session.model, "stop_token", settings.TRAC_STOP_TOKEN)

    risks = _estimate(session, input) if policy.active else {}
    original = session.model.next_output(history, input, action_params(derive_seed(session.seed, ACTION, t)))
    if original == stop_token:
        return session, None

    at_risk = sorted(key for key, estimate in risks.items() if estimate.probability >= policy.tau)
    final_input, final_output = input, original
    if at_risk:
        logger.info(f"Step {t}: risk {max(risks[key].probability for key in at_risk):.3f} >= {policy.tau} for {', '.join(at_risk)}; applying {policy.strategy}")
        if policy.strategy == "inject":
            residuals = {key: session.states[key].residual for key in at_risk}
            final_input = apply_inject(input, residuals, policy.template_path)
            final_output = session.model.next_output(history, final_input, action_params(derive_seed(session.seed, ACTION, t)))
        elif policy.strategy == "switch":
            final_output = apply_switch(session.substitute, history, input, session.rules(), action_params(derive_seed(session.seed, ACTION, t)))
        elif policy.strategy == "resample":
            result = apply_resample(
                list(session.states.values()),
                session.model,
                session.labeler,
                history,
                input,
                policy.n,
                policy.k,
                session.seed,
            )
            final_output = result.output

    risk_before: dict[str, float] = {}
    risk_after: dict[str, float] = {}
    contract_held = None
    if at_risk:
        seed = derive_seed(session.seed, CONTRACT, t)
        risk_before = {key: estimate.probability for key, estimate in _estimate(session, input, original, seed).items()}
        risk_after = {
            key: estimate.probability
            for key, estimate in _estimate(session, final_input, final_output, seed).items()
        }
        contract_held = all(risk_after[key] <= risk_before[key] for key in risk_before)
        if not contract_held:
            logger.warning(f"Step {t}: intervention did not lower the estimated risk ({risk_before} -> {risk_after})")

    session, verdicts = _monitor(session, final_input, final_output)
    outcome = GuardedStepOutcome(
        t=t,
        input=input,
        final_input=final_input,
        original_output=original,
        final_output=final_output,
        intervened=bool(at_risk),
        strategy=policy.strategy if at_risk else "none",
        risks=risks,
        risk_before=risk_before,
        risk_after=risk_after,
        contract_held=contract_held,
        verdicts=verdicts,
        residuals={key: state.residual for key, state in session.states.items()},
    )
    return session, outcome


def guard_step(session: GuardSession, next_input: str) -> tuple[GuardSession, GuardedStepOutcome | None]:
    """
    Run one guarded step and return the advanced session with its outcome.

    The outcome is None when the model emits its stop token. On failure the
    caller's session is unchanged.
    """
    try:
        return _guard_step(session, next_input)
    except (ModelError, LabelingError, PredictionError) as exc:
        logger.error(f"Guarded step {session.t} failed: {exc}")
        raise GuardStepError(session.t, f"{type(exc).__name__}: {exc}") from exc


# LOOPS


@dataclass(frozen=True)
class GuardRun:
    trace: Trace
    outcomes: tuple[GuardedStepOutcome, ...]
    reports: list[VerdictReport]

    @property
    def violations(self) -> int:
        return sum(report.violations for report in self.reports)

    @property
    def violation_rate(self) -> float:
        return self.violations / len(self.trace) if len(self.trace) else 0.0

    @property
    def interventions(self) -> int:
        return sum(outcome.intervened for outcome in self.outcomes)


def run_guarded(session: GuardSession, inputs: ScriptedInputs | Sequence[str] = (), max_steps: int = 100) -> GuardRun:
    inputs = inputs if isinstance(inputs, ScriptedInputs) else ScriptedInputs(tuple(inputs))
    outcomes = []
    for _ in range(max_steps):
        try:
            session, outcome = guard_step(session, inputs.at(session.t))
        except GuardStepError as exc:
            exc.partial = GuardRun(trace=session.history, outcomes=tuple(outcomes), reports=session.reports())
            raise
        if outcome is None:
            logger.info(f"Model stopped at step {session.t}")
            break
        outcomes.append(outcome)
    run = GuardRun(trace=session.history, outcomes=tuple(outcomes), reports=session.reports())
    logger.info(f"Guarded run: {len(run.trace)} steps, {run.interventions} interventions, violation rate {run.violation_rate:.3f}")
    return run


def run_baseline(
    constraints: Iterable[Constraint] | Mapping[str, Formula],
    model: BlackBoxModel,
    labeler: LabelingFunction,
    inputs: ScriptedInputs | Sequence[str] = (),
    max_steps: int = 100,
    mode: Mode = "reset",
    seed: int = 0,
) -> GuardRun:
    """The same loop with no prediction or intervention."""
    inputs = inputs if isinstance(inputs, ScriptedInputs) else ScriptedInputs(tuple(inputs))
    stop_token = getattr(model, "stop_token", settings.TRAC_STOP_TOKEN)
    monitor = Monitor(as_constraints(constraints), mode)
    trace = Trace()
    for t in range(1, max_steps + 1):
        input = inputs.at(t)
        output = model.next_output(trace.steps, input, action_params(derive_seed(seed, ACTION, t)))
        if output == stop_token:
            break
        record = StepRecord(t=t, input=input, output=output)
        record = record.with_labels(label_step(labeler, (*trace.steps, record)))
        trace = replace(trace, steps=trace.steps + (record,))
        monitor.observe(record)
    return GuardRun(trace=trace, outcomes=(), reports=monitor.reports())
