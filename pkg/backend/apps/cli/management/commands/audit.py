from backend.apps.cli.base import TracCommand, labeled_trace
from backend.apps.cli.factories import named_model
from backend.apps.cli.serializers import load_config
from backend.apps.monitoring.engine import MODES, audit_log
from backend.apps.monitoring.judge import judge_audit
from backend.apps.monitoring.scoring import score_f1
from backend.apps.traces.io import dump_reports, load_reports, reports_document


class Command(TracCommand):
    help = "Audit a complete trace against the configured constraints and archive the verdict reports."

    def add_arguments(self, parser):
        parser.add_argument("trace", help="JSONL trace file")
        parser.add_argument("config", help="Experiment config")
        parser.add_argument("--mode", choices=MODES, help="Monitor mode; defaults to the config's")
        parser.add_argument("--cross-check", action="store_true", help="Re-monitor every prefix from scratch")
        parser.add_argument("--f1-against", metavar="REPORTS", help="Score the reports against a ground-truth report file")
        parser.add_argument("--auditor", choices=("trac", "judge"), default="trac")
        parser.add_argument("--with-labels", action="store_true", help="Show the judge auditor the true propositions")
        parser.add_argument("--output", help="Report file; defaults to the config's outputs.reports")

    def run(self, **options):
        config = load_config(options["config"])
        mode = options["mode"] or config.mode
        trace = labeled_trace(options["trace"], config)

        if options["auditor"] == "judge":
            judge = named_model(config, config.judge, "judge")
            audit = judge_audit(trace, config.constraints, judge, with_labels=options["with_labels"], seed=config.seed)
            reports = audit.reports
            if audit.unanswered:
                self.summary(f"judge left actions {list(audit.unanswered)} unanswered")
        else:
            reports = audit_log(trace, config.constraints, mode, cross_check=options["cross_check"])

        output = options["output"] or config.outputs.get("reports")
        if output:
            dump_reports(reports, output, mode)

        document = reports_document(reports, mode)
        if options["f1_against"]:
            board = score_f1(reports, load_reports(options["f1_against"]))
            document["score"] = board.to_dict()
            pooled = board.pooled
            self.summary(f"F1 {pooled.f1:.3f} (precision {pooled.precision:.3f}, recall {pooled.recall:.3f})")
        self.emit(document)

        violations = sum(report.violations for report in reports)
        for report in reports:
            self.summary(f"{report.constraint_id}: {report.violations} violation(s), {len(report.witnesses)} witness(es)")
        self.violations_found(violations)
