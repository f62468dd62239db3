import json

import pytest

from backend.apps.adapters.blackbox import ScriptedModel
from backend.apps.synthbench.exceptions import KnobError
from backend.apps.synthbench.generators import gen_constraint_scaling, gen_elasticity, gen_proposition_scaling
from backend.apps.synthbench.io import load_bench, save_bench, write_eval_report
from backend.apps.synthbench.judges import (
    CoinFlipJudge,
    MonitorOracleJudge,
    eval_judge,
    judge_prompt,
    parse_judgment,
    resolve_style,
)
from backend.apps.traces.exceptions import TraceFormatError


class TestPrompts:
    def test_single_prompt_lists_every_step(self):
        case = gen_elasticity(2, seed=0, count=1)[0]
        prompt = judge_prompt(case)
        assert all(step.output in prompt for step in case.trace)
        assert "VALID" in prompt

    def test_styles_resolve_from_the_case(self):
        assert resolve_style(gen_elasticity(2, count=1)[0]) == "single"
        assert resolve_style(gen_constraint_scaling(3)) == "multi"
        assert resolve_style(gen_proposition_scaling(2)) == "entities"

    def test_multi_prompt_numbers_constraints(self):
        prompt = judge_prompt(gen_constraint_scaling(3))
        for number in (1, 2, 3):
            assert f"Constraint {number}: The trace is VALID for this constraint" in prompt

    def test_single_style_rejects_multiple_constraints(self):
        with pytest.raises(KnobError, match="prompt_style"):
            judge_prompt(gen_constraint_scaling(2), "single")

    def test_unknown_level(self):
        with pytest.raises(KnobError, match="level"):
            judge_prompt(gen_elasticity(2, count=1)[0], level="formal")


class TestParseJudgment:
    def test_single_answer(self):
        assert parse_judgment("The trace is INVALID.", 1, "single") == [False]
        assert parse_judgment("valid", 1, "single") == [True]

    def test_last_word_wins(self):
        assert parse_judgment("VALID or INVALID? After checking: INVALID", 1, "single") == [False]

    def test_no_answer(self):
        assert parse_judgment("I cannot tell.", 1, "single") == [None]

    def test_multi(self):
        reply = "Constraint 1: VALID\nConstraint 2: **INVALID**\nConstraint 9: VALID"
        assert parse_judgment(reply, 3, "multi") == [True, False, None]


class TestEvalJudge:
    def test_oracle_is_always_right(self):
        bench = gen_elasticity(3, seed=0, count=6) + [gen_constraint_scaling(4, seed=1)]
        evaluation = eval_judge(bench, MonitorOracleJudge(bench))
        assert evaluation.overall.accuracy == 1.0
        assert evaluation.parse_failures == 0
        assert set(evaluation.groups) == {"elasticity/simple/gap=3", "constraints/simple/n=4"}

    def test_oracle_with_precise_wording(self):
        bench = gen_proposition_scaling(2, seed=3), gen_proposition_scaling(2, seed=4)
        judge = MonitorOracleJudge(bench, level="precise+ltl")
        assert eval_judge(bench, judge, level="precise+ltl").overall.accuracy == 1.0

    def test_coin_flip_is_near_chance(self):
        bench = gen_elasticity(1, seed=5, count=400)
        accuracy = eval_judge(bench, CoinFlipJudge(seed=0)).overall.accuracy
        assert 0.42 <= accuracy <= 0.58

    def test_missing_answer_counts_as_wrong(self):
        case = gen_constraint_scaling(2, seed=0, satisfied=[True, True])
        judge = ScriptedModel(["Constraint 1: VALID"], stop_token="<stop>")
        evaluation = eval_judge([case], judge)
        assert evaluation.overall.correct == 1
        assert evaluation.overall.total == 2
        assert evaluation.parse_failures == 1
        assert evaluation.answers == [(case.id, (True, None), (True, True))]


class TestBenchFiles:
    def test_save_and_load(self, tmp_path):
        cases = gen_elasticity(2, "complex", seed=7, count=2)
        path = tmp_path / "bench.jsonl"
        save_bench(cases, path)
        loaded = load_bench(path)
        assert [case.id for case in loaded] == [case.id for case in cases]
        assert loaded[0].constraints == cases[0].constraints
        assert loaded[1].truth == cases[1].truth
        assert [step.labels for step in loaded[0].trace] == [step.labels for step in cases[0].trace]
        assert loaded[0].group == cases[0].group

    def test_truth_length_mismatch(self, tmp_path):
        case = gen_elasticity(2, seed=7, count=1)
        path = tmp_path / "bench.jsonl"
        save_bench(case, path)
        payload = json.loads(path.read_text())
        payload["truth"] = [True, False]
        path.write_text(json.dumps(payload) + "\n")
        with pytest.raises(TraceFormatError, match="line 1"):
            load_bench(path)

    def test_unlabeled_step(self, tmp_path):
        path = tmp_path / "bench.jsonl"
        save_bench(gen_elasticity(2, seed=7, count=1), path)
        payload = json.loads(path.read_text())
        payload["trace"][3]["labels"] = None
        path.write_text(json.dumps(payload) + "\n")
        with pytest.raises(TraceFormatError, match="no labels"):
            load_bench(path)

    def test_malformed_line(self, tmp_path):
        path = tmp_path / "bench.jsonl"
        path.write_text("{not json\n")
        with pytest.raises(TraceFormatError, match="malformed JSON at line 1"):
            load_bench(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "bench.jsonl"
        path.write_text("\n")
        with pytest.raises(TraceFormatError, match="empty"):
            load_bench(path)

    def test_eval_report(self, tmp_path):
        bench = gen_elasticity(3, seed=0, count=2)
        evaluation = eval_judge(bench, MonitorOracleJudge(bench))
        write_eval_report(evaluation, tmp_path / "report.json")
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["overall"]["accuracy"] == 1.0
        assert [entry["truth"] for entry in report["cases"]] == [[True], [False]]
