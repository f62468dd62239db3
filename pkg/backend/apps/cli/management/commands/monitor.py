from backend.apps.cli.base import TracCommand, labeled_trace
from backend.apps.cli.serializers import load_config
from backend.apps.ltl.formula import Verdict
from backend.apps.monitoring.engine import MODES, run_online


class Command(TracCommand):
    help = "Stream per-step verdicts of the configured constraints over a trace file."

    def add_arguments(self, parser):
        parser.add_argument("trace", help="JSONL trace file")
        parser.add_argument("config", help="Experiment config (constraints and labeler)")
        parser.add_argument("--mode", choices=MODES, help="Monitor mode; defaults to the config's")

    def run(self, **options):
        config = load_config(options["config"])
        mode = options["mode"] or config.mode
        trace = labeled_trace(options["trace"], config)

        violations = 0
        for record, verdicts in run_online(trace, config.constraints, mode):
            self.emit({"t": record.t, "verdicts": {key: verdict.value for key, verdict in verdicts.items()}})
            for constraint_id, verdict in verdicts.items():
                if verdict is Verdict.VIOLATED:
                    violations += 1
                    self.summary(f"step {record.t}: {constraint_id} violated")
        self.summary(f"{len(trace)} steps, {violations} violation(s) ({mode} mode)")
        self.violations_found(violations)
