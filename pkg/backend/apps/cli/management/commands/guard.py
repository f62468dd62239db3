import json
from pathlib import Path

from django.core.management.base import CommandError

from backend.apps.cli.base import EXIT_ERROR, TracCommand
from backend.apps.cli.factories import build_labeler, named_model
from backend.apps.cli.serializers import load_config
from backend.apps.intervention.exceptions import GuardStepError
from backend.apps.intervention.guard import GuardRun, GuardSession, run_guarded
from backend.apps.traces.io import dump_reports, save_trace


class Command(TracCommand):
    help = "Run the agent under the predictive guard and write the run log, trace and reports."

    def add_arguments(self, parser):
        parser.add_argument("config", help="Experiment config (agent, labeler, policy, inputs, outputs)")
        parser.add_argument("--max-steps", type=int, default=100)
        parser.add_argument("--seed", type=int, help="Defaults to the config's seed")

    def run(self, **options):
        config = load_config(options["config"])
        policy = config.policy
        model = named_model(config, config.agent, "agent")
        substitute = named_model(config, policy.substitute_model, "substitute") if policy.substitute_model else None
        session = GuardSession.start(
            config.constraints,
            policy,
            model,
            build_labeler(config),
            substitute=substitute,
            mode=config.mode,
            seed=config.seed if options["seed"] is None else options["seed"],
        )

        try:
            run = run_guarded(session, config.inputs, max_steps=options["max_steps"])
        except GuardStepError as exc:
            if exc.partial is not None:
                self.write_outputs(exc.partial, config.outputs, config.mode)
                self.summary(f"partial run of {len(exc.partial.trace)} steps written")
            raise CommandError(str(exc), returncode=EXIT_ERROR) from exc

        self.write_outputs(run, config.outputs, config.mode)
        self.emit({
            "steps": len(run.trace),
            "violations": run.violations,
            "violation_rate": run.violation_rate,
            "interventions": run.interventions,
            "strategy": policy.strategy,
        })
        self.summary(
            f"{len(run.trace)} steps, violation rate {run.violation_rate:.3f}, "
            f"{run.interventions} intervention(s) ({policy.strategy})"
        )

    def write_outputs(self, run: GuardRun, outputs: dict, mode: str) -> None:
        if outputs.get("trace"):
            save_trace(run.trace, outputs["trace"])
        if outputs.get("reports"):
            dump_reports(run.reports, outputs["reports"], mode)
        if outputs.get("log"):
            path = Path(outputs["log"])
            path.parent.mkdir(parents=True, exist_ok=True)
            lines = (json.dumps(outcome.to_dict(), ensure_ascii=False, sort_keys=True) for outcome in run.outcomes)
            path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
