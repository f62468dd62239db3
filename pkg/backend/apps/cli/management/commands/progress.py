from django.core.management.base import CommandError

from backend.apps.cli.base import EXIT_ERROR, TracCommand
from backend.apps.ltl.formula import PROPOSITION_RE, RESERVED_NAMES
from backend.apps.ltl.parser import parse
from backend.apps.ltl.progression import advance, verdict_of
from backend.apps.ltl.rendering import render
from backend.apps.traces.io import load_trace


def split_labels(text: str) -> frozenset[str]:
    names = frozenset(name.strip() for name in text.split(",") if name.strip())
    invalid = sorted(name for name in names if not PROPOSITION_RE.match(name) or name in RESERVED_NAMES)
    if invalid:
        raise CommandError(f"Invalid proposition names: {', '.join(invalid)}", returncode=EXIT_ERROR)
    return names


class Command(TracCommand):
    help = "Progress a formula through a sequence of truth assignments, printing the residual after each."

    def add_arguments(self, parser):
        parser.add_argument("formula")
        parser.add_argument(
            "--labels",
            action="append",
            default=[],
            help='Comma-separated propositions true at one step; repeat once per step ("" for none)',
        )
        parser.add_argument("--steps", help="Labeled trace file supplying the assignments instead")

    def run(self, **options):
        phi = parse(options["formula"])
        if options["steps"]:
            trace = load_trace(options["steps"])
            if not trace.is_labeled:
                raise CommandError(f"Trace {options['steps']} is not labeled", returncode=EXIT_ERROR)
            assignments = [step.labels for step in trace]
        else:
            assignments = [split_labels(text) for text in options["labels"]]

        residual = phi
        for t, sigma in enumerate(assignments, start=1):
            residual = advance(residual, sigma)
            verdict = verdict_of(residual)
            self.emit({"t": t, "labels": sorted(sigma), "residual": render(residual), "verdict": verdict.value})
            self.summary(f"{t}: {render(residual)} / {verdict.label}")
            if verdict.is_terminal:
                break
