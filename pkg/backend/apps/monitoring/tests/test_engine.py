import numpy as np
import pytest

from backend.apps.ltl.formula import FALSE, TRUE, Verdict
from backend.apps.ltl.generators import all_lassos, random_assignment, random_formula
from backend.apps.ltl.parser import parse
from backend.apps.ltl.progression import advance
from backend.apps.monitoring.engine import (
    Constraint,
    Monitor,
    MonitorState,
    as_constraints,
    audit_log,
    run_monitor,
    run_online,
    step,
)
from backend.apps.monitoring.exceptions import MissingLabelsError, MonitoringError
from backend.apps.traces.records import StepRecord, Trace

S, V, I = Verdict.SATISFIED, Verdict.VIOLATED, Verdict.INCONCLUSIVE


def state_for(text, reset=False):
    return MonitorState.initial(Constraint.from_text("c", text), reset=reset)


def record(t, labels):
    return StepRecord(t=t, input="", output=" ".join(sorted(labels)), labels=frozenset(labels))


def random_trace(rng, propositions, length):
    return Trace.from_labels(random_assignment(rng, propositions) for _ in range(length))


def satisfied_on_every_continuation(formula, labels):
    return all(lasso.extend(labels).satisfies(formula) for lasso in all_lassos(["a", "b"], 1))


class TestStep:
    def test_eventually_satisfied(self):
        state, verdict = step(state_for("F putdown"), {"putdown"}, record(1, {"putdown"}))
        assert verdict is S
        assert state.witness[-1].residual == TRUE

    def test_always_violated(self):
        state, verdict = step(state_for("G p"), set(), record(1, set()))
        assert verdict is V
        assert state.residual == FALSE

    def test_reset_mode_restarts(self):
        state = state_for("G p", reset=True)
        state, first = step(state, set(), record(1, set()))
        state, second = step(state, {"p"}, record(2, {"p"}))
        assert (first, second) == (V, I)
        assert state.violations == 1
        assert state.residual == parse("G p")
        assert state.witness == ()
        assert len(state.archived) == 1

    def test_plain_mode_absorbs(self):
        state, _ = step(state_for("G p"), set(), record(1, set()))
        after, verdict = step(state, {"p"}, record(2, {"p"}))
        assert verdict is V
        assert after.residual == FALSE
        assert after.witness == state.witness

    def test_witness_only_on_change(self):
        state = state_for("F(p & X q)")
        state, _ = step(state, set(), record(1, set()))
        assert state.witness == ()
        state, _ = step(state, {"p"}, record(2, {"p"}))
        assert [entry.t for entry in state.witness] == [2]

    def test_state_is_immutable_value(self):
        original = state_for("G p")
        step(original, set(), record(1, set()))
        assert original.residual == parse("G p")
        assert original.violations == 0


class TestRunMonitor:
    def test_report_shape(self):
        trace = Trace.from_labels([{"a"}, set(), {"b"}, set(), {"a", "b"}])
        reports = run_monitor(trace, {"one": parse("G a"), "two": parse("F b")})
        assert [report.constraint_id for report in reports] == ["one", "two"]
        assert all(len(report.verdicts) == 5 for report in reports)

    def test_true_constraint(self):
        trace = Trace.from_labels([set(), set(), set()])
        plain = run_monitor(trace, {"c": TRUE})[0]
        reset = run_monitor(trace, {"c": TRUE}, mode="reset")[0]
        assert plain.verdicts == (S, S, S)
        assert reset.verdicts == (S, S, S)
        assert reset.satisfactions == 3

    def test_sequence_formula(self):
        labels = [set(), {"a"}, set(), set(), set(), set(), {"b"}]
        report = run_monitor(Trace.from_labels(labels), {"c": parse("F(a & X F b)")})[0]
        assert report.verdicts == (I, I, I, I, I, I, S)
        assert satisfied_on_every_continuation(parse("F(a & X F b)"), labels)

    def test_missing_labels(self):
        trace = Trace((StepRecord(t=1, input="", output="x"),))
        with pytest.raises(MissingLabelsError):
            run_monitor(trace, {"c": parse("G a")})

    def test_reset_counters_match_terminal_verdicts(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            formula = random_formula(rng, ["a", "b"], max_depth=3)
            report = run_monitor(random_trace(rng, ["a", "b"], 15), {"c": formula}, mode="reset")[0]
            terminal = sum(verdict.is_terminal for verdict in report.verdicts)
            assert report.violations + report.satisfactions == terminal
            assert len(report.witnesses) == terminal

    def test_plain_mode_absorption(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            formula = random_formula(rng, ["a", "b", "c"], max_depth=4)
            verdicts = run_monitor(random_trace(rng, ["a", "b", "c"], 12), {"c": formula})[0].verdicts
            first_terminal = next((index for index, verdict in enumerate(verdicts) if verdict.is_terminal), None)
            if first_terminal is not None:
                assert set(verdicts[first_terminal:]) == {verdicts[first_terminal]}

    def test_independence(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            first = random_formula(rng, ["a", "b"], max_depth=3)
            second = random_formula(rng, ["a", "b"], max_depth=3)
            trace = random_trace(rng, ["a", "b"], 10)
            together = run_monitor(trace, {"x": first, "y": second}, mode="reset")
            apart = run_monitor(trace, {"x": first}, mode="reset") + run_monitor(trace, {"y": second}, mode="reset")
            assert together == apart

    def test_witness_replays_to_violation(self):
        formula = parse("G(p -> X q)")
        report = run_monitor(Trace.from_labels([set(), {"p"}, set(), {"q"}]), {"c": formula})[0]
        assert report.verdicts[2] is V
        (witness,) = report.witnesses
        assert [entry.t for entry in witness] == [2, 3]
        residual = formula
        for entry in witness:
            residual = advance(residual, entry.labels)
        assert residual == FALSE

    def test_soundness_against_lasso_continuations(self):
        rng = np.random.default_rng(8)
        continuations = all_lassos(["a", "b"], 2)
        for _ in range(40):
            formula = random_formula(rng, ["a", "b"], max_depth=3)
            labels = [random_assignment(rng, ["a", "b"]) for _ in range(4)]
            verdicts = run_monitor(Trace.from_labels(labels), {"c": formula})[0].verdicts
            for t, verdict in enumerate(verdicts, start=1):
                if verdict.is_terminal:
                    expected = verdict is S
                    assert all(lasso.extend(labels[:t]).satisfies(formula) is expected for lasso in continuations)
                    break


class TestMonitor:
    def test_unknown_mode(self):
        with pytest.raises(MonitoringError, match="mode"):
            Monitor({"c": TRUE}, mode="eager")

    def test_duplicate_ids(self):
        with pytest.raises(MonitoringError, match="Duplicate"):
            as_constraints([Constraint("c", TRUE), Constraint("c", FALSE)])

    def test_online_stream(self):
        trace = Trace.from_labels([set(), {"p"}])
        stream = list(run_online(trace, {"c": parse("F p")}))
        assert [verdicts["c"] for _, verdicts in stream] == [I, S]


class TestAuditLog:
    def test_equals_run_monitor(self):
        rng = np.random.default_rng(9)
        constraints = {f"c{index}": random_formula(rng, ["a", "b", "c"], max_depth=4) for index in range(4)}
        trace = random_trace(rng, ["a", "b", "c"], 20)
        for mode in ("plain", "reset"):
            assert audit_log(trace, constraints, mode, cross_check=True) == run_monitor(trace, constraints, mode)

    def test_empty_constraint_set(self):
        assert audit_log(Trace.from_labels([set()]), {}) == []

    def test_empty_trace(self):
        with pytest.raises(MonitoringError, match="empty"):
            audit_log(Trace(), {"c": TRUE})
