import pytest

from backend.apps.adapters.blackbox import ScriptedModel
from backend.apps.adapters.labelers import AttributeLabeler, EmbeddedLabeler, EndpointLabeler, RuleLabeler
from backend.apps.traces.exceptions import LabelingError
from backend.apps.traces.labeling import LabelingFunction, label_step
from backend.apps.traces.records import StepRecord


def step(output, input="", t=1, labels=None):
    return StepRecord(t=t, input=input, output=output, labels=labels)


class RecordingModel:
    def __init__(self, reply):
        self.reply = reply
        self.prompts = []

    def next_output(self, history, input, params):
        self.prompts.append(input)
        return self.reply


class TestRuleLabeler:
    def test_keyword(self):
        labeler = RuleLabeler({"stop": "STOP"})
        assert label_step(labeler, [step("STOP now")]) == {"stop"}
        assert label_step(labeler, [step("go on")]) == frozenset()

    def test_field_and_case(self):
        labeler = RuleLabeler(
            {
                "asked": {"pattern": r"\?$", "field": "input"},
                "pickup": {"pattern": r"\bpick up\b", "ignore_case": True},
                "mention": {"pattern": "box", "field": "both"},
            }
        )
        assert label_step(labeler, [step("Pick Up the key", input="what now?")]) == {"asked", "pickup"}
        assert label_step(labeler, [step("done", input="the box")]) == {"mention"}

    def test_only_latest_step_is_read(self):
        labeler = RuleLabeler({"stop": "STOP"})
        assert label_step(labeler, [step("STOP", t=1), step("wait", t=2)]) == frozenset()

    def test_invalid_names_rejected(self):
        with pytest.raises(ValueError, match="Invalid proposition"):
            RuleLabeler({"G": "x"})

    def test_unknown_field_rejected(self):
        with pytest.raises(ValueError, match="unknown field"):
            RuleLabeler({"a": {"pattern": "x", "field": "metadata"}})

    def test_satisfies_protocol(self):
        assert isinstance(RuleLabeler({"a": "x"}), LabelingFunction)


class TestAttributeLabeler:
    def test_single_entity_event(self):
        labels = label_step(AttributeLabeler(), [step("Observed a red oval (number 19) alongside a deer.")])
        assert labels == {"color_red", "shape_oval", "animal_deer", "number_19"}

    def test_multi_entity_event(self):
        text = (
            "Entity 1: A red heart carrying the number 57 drifted past a wolf. "
            "Entity 2: Observed a silver arrow (number 4) alongside a falcon."
        )
        labels = label_step(AttributeLabeler(entities=2), [step(text)])
        assert labels == {
            "entity1_color_red", "entity1_shape_heart", "entity1_number_57", "entity1_animal_wolf",
            "entity2_color_silver", "entity2_shape_arrow", "entity2_number_4", "entity2_animal_falcon",
        }

    def test_undeclared_entity_fails(self):
        text = "Entity 3: Observed a red oval (number 19) alongside a deer."
        with pytest.raises(LabelingError, match="undeclared"):
            label_step(AttributeLabeler(entities=2), [step(text)])

    def test_unrelated_text(self):
        assert label_step(AttributeLabeler(), [step("nothing to see")]) == frozenset()


class TestEmbeddedLabeler:
    def test_returns_embedded(self):
        history = [step("x", labels={"a"})]
        labeler = EmbeddedLabeler.for_steps(history)
        assert labeler.vocabulary == {"a"}
        assert label_step(labeler, history) == {"a"}

    def test_missing_labels_fail(self):
        with pytest.raises(LabelingError, match="no embedded labels"):
            label_step(EmbeddedLabeler({"a"}), [step("x")])


class TestEndpointLabeler:
    def test_batched_question(self):
        model = RecordingModel("pickup: yes\nputdown: no")
        labeler = EndpointLabeler(model, {"pickup", "putdown"}, descriptions={"pickup": "the agent picks something up"})

        assert label_step(labeler, [step("pick up the cube", input="go")]) == {"pickup"}
        assert len(model.prompts) == 1
        prompt = model.prompts[0]
        assert "- pickup: the agent picks something up" in prompt
        assert "- putdown: putdown" in prompt
        assert "output: pick up the cube" in prompt
        assert labeler.warnings == []

    def test_lenient_parsing(self):
        model = RecordingModel("Here you go:\n- **PICKUP**: Yes\n`putdown` = NO")
        labeler = EndpointLabeler(model, {"pickup", "putdown"})
        assert label_step(labeler, [step("x")]) == {"pickup"}
        assert labeler.warnings == []

    def test_unparseable_reply_is_absent_with_warning(self):
        labeler = EndpointLabeler(RecordingModel("I cannot tell."), {"pickup", "putdown"})
        assert label_step(labeler, [step("x", t=1)]) == frozenset()
        assert [(warning.t, warning.proposition) for warning in labeler.warnings] == [(1, "pickup"), (1, "putdown")]

    def test_unknown_names_ignored(self):
        labeler = EndpointLabeler(RecordingModel("pickup: yes\nexplode: yes"), {"pickup"})
        assert label_step(labeler, [step("x")]) == {"pickup"}

    def test_history_truncated_to_tail(self):
        model = RecordingModel("a: no")
        labeler = EndpointLabeler(model, {"a"}, context_chars=25)
        history = [StepRecord(t=t, input="", output=f"step-{t}-" + "x" * 10) for t in range(1, 6)]

        label_step(labeler, history)

        assert labeler.truncations == [5]
        prompt = model.prompts[0]
        assert "older steps omitted" in prompt
        assert "Step 4:" in prompt
        assert "Step 1:" not in prompt

    def test_short_history_untouched(self):
        model = RecordingModel("a: no")
        labeler = EndpointLabeler(model, {"a"})
        label_step(labeler, [step("first", t=1), step("second", t=2)])
        assert labeler.truncations == []
        assert "Step 1: input:  | output: first" in model.prompts[0]

    def test_works_with_any_model(self):
        labeler = EndpointLabeler(ScriptedModel(["a: yes"], cycle=True), {"a"})
        assert label_step(labeler, [step("x")]) == {"a"}
