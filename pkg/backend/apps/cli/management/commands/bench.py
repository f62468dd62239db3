from django.core.management.base import CommandError

from backend.apps.cli.base import EXIT_ERROR, TracCommand
from backend.apps.cli.factories import named_model
from backend.apps.cli.serializers import load_config
from backend.apps.synthbench.generators import (
    FAMILIES,
    SUITES,
    gen_constraint_scaling,
    gen_elasticity,
    gen_proposition_scaling,
    gen_spec_patterns,
)
from backend.apps.synthbench.io import load_bench, save_bench, write_eval_report
from backend.apps.synthbench.judges import PROMPT_STYLES, CoinFlipJudge, MonitorOracleJudge, eval_judge
from backend.apps.synthbench.patterns import LEVELS, PATTERNS

JUDGES = ("oracle", "coin", "config")


class Command(TracCommand):
    help = "Generate synthetic benchmark cases (gen) or evaluate a judge on them (eval)."

    def add_arguments(self, parser):
        actions = parser.add_subparsers(dest="action", required=True)

        gen = actions.add_parser("gen", help="Generate a bench file")
        gen.add_argument("--suite", choices=SUITES, required=True)
        gen.add_argument("--family", choices=FAMILIES, default="simple")
        gen.add_argument("--gap", type=int, help="elasticity: steps between path events")
        gen.add_argument("--n", type=int, help="constraints: constraints per trace")
        gen.add_argument("--entities", type=int, help="propositions: entities per step")
        gen.add_argument("--pattern", choices=PATTERNS, help="spec: pattern to generate")
        gen.add_argument("--count", type=int, default=40, help="Cases per seed (elasticity, spec) or in total")
        gen.add_argument("--seeds", type=int, default=1, help="Seeds to spread batched suites over")
        gen.add_argument("--seed", type=int, default=0, help="First seed")
        gen.add_argument("--output", required=True, help="Bench file (JSONL)")

        evaluate = actions.add_parser("eval", help="Evaluate a judge on a bench file")
        evaluate.add_argument("bench", help="Bench file (JSONL)")
        evaluate.add_argument("--judge", choices=JUDGES, default="oracle", help="config uses the config's judge model")
        evaluate.add_argument("--config", help="Experiment config naming the judge model")
        evaluate.add_argument("--prompt-style", choices=PROMPT_STYLES, default="auto")
        evaluate.add_argument("--level", choices=LEVELS, default="informal")
        evaluate.add_argument("--seed", type=int, default=0)
        evaluate.add_argument("--output", help="Evaluation report (JSON)")

    def run(self, **options):
        if options["action"] == "gen":
            self.generate(options)
        else:
            self.evaluate(options)

    def generate(self, options):
        suite, family, first = options["suite"], options["family"], options["seed"]
        knob = {"elasticity": "gap", "constraints": "n", "propositions": "entities", "spec": "pattern"}[suite]
        if options[knob] is None:
            raise CommandError(f"--{knob} is required for the {suite} suite", returncode=EXIT_ERROR)

        match suite:
            case "elasticity":
                cases = [
                    case
                    for seed in range(first, first + options["seeds"])
                    for case in gen_elasticity(options["gap"], family, seed, options["count"])
                ]
            case "spec":
                cases = [
                    case
                    for seed in range(first, first + options["seeds"])
                    for case in gen_spec_patterns(options["pattern"], seed, options["count"])
                ]
            case "constraints":
                cases = [gen_constraint_scaling(options["n"], family, seed) for seed in range(first, first + options["count"])]
            case _:
                cases = [gen_proposition_scaling(options["entities"], family, seed) for seed in range(first, first + options["count"])]

        save_bench(cases, options["output"])
        judgments = sum(len(case.truth) for case in cases)
        satisfied = sum(sum(case.truth) for case in cases)
        self.emit({"suite": suite, "cases": len(cases), "judgments": judgments, "satisfied": satisfied, "path": options["output"]})
        self.summary(f"{len(cases)} {suite} cases, {satisfied}/{judgments} satisfied, written to {options['output']}")

    def evaluate(self, options):
        bench = load_bench(options["bench"])
        match options["judge"]:
            case "oracle":
                judge = MonitorOracleJudge(bench, options["prompt_style"], options["level"])
            case "coin":
                judge = CoinFlipJudge(options["seed"])
            case _:
                if not options["config"]:
                    raise CommandError("--judge config needs --config", returncode=EXIT_ERROR)
                config = load_config(options["config"])
                judge = named_model(config, config.judge, "judge")

        evaluation = eval_judge(bench, judge, options["prompt_style"], options["level"], options["seed"])
        if options["output"]:
            write_eval_report(evaluation, options["output"])
        self.emit(evaluation.to_dict())
        for group, estimate in sorted(evaluation.groups.items()):
            self.summary(f"{group:<40} {estimate.accuracy:.3f} ± {estimate.half_width:.3f} (n={estimate.total})")
        overall = evaluation.overall
        self.summary(f"{'overall':<40} {overall.accuracy:.3f} ± {overall.half_width:.3f} ({evaluation.parse_failures} unparsed)")
