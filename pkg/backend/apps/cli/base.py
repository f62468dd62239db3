"""
Shared plumbing of the management commands.

Machine output is JSON on stdout; summaries go to stderr. Library errors end
the command with exit code 2, found violations with exit code 1.
"""
import json
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from backend.apps.adapters.exceptions import ModelError
from backend.apps.intervention.exceptions import InterventionError
from backend.apps.ltl.exceptions import FormulaSyntaxError, LTLError
from backend.apps.monitoring.exceptions import MonitoringError
from backend.apps.predictive.exceptions import PredictionError
from backend.apps.synthbench.exceptions import SynthbenchError
from backend.apps.traces.exceptions import LabelingError, TraceFormatError
from backend.apps.traces.io import load_trace
from backend.apps.traces.labeling import apply_labeler
from backend.apps.traces.records import Trace

from .exceptions import ConfigError
from .factories import build_labeler
from .serializers import Config

logger = logging.getLogger(__name__)

EXIT_VIOLATIONS = 1
EXIT_ERROR = 2

HANDLED_ERRORS = (
    LTLError,
    TraceFormatError,
    LabelingError,
    ConfigError,
    MonitoringError,
    PredictionError,
    InterventionError,
    ModelError,
    SynthbenchError,
    OSError,
)


class TracCommand(BaseCommand):
    requires_system_checks = []

    def handle(self, *args, **options):
        try:
            self.run(**options)
        except FormulaSyntaxError as exc:
            raise CommandError(exc.describe(), returncode=EXIT_ERROR) from exc
        except HANDLED_ERRORS as exc:
            logger.error(f"{type(exc).__name__}: {exc}")
            raise CommandError(str(exc), returncode=EXIT_ERROR) from exc

    def run(self, **options) -> None:
        raise NotImplementedError

    def emit(self, payload) -> None:
        self.stdout.write(json.dumps(payload, ensure_ascii=False, sort_keys=True))

    def summary(self, text: str) -> None:
        self.stderr.write(text, style_func=str)

    def violations_found(self, count: int) -> None:
        if count:
            raise CommandError(f"{count} violation(s) found", returncode=EXIT_VIOLATIONS)


def labeled_trace(path: str | Path, config: Config) -> Trace:
    """Load a trace, labeling it with the config's labeler when it carries no labels."""
    trace = load_trace(path)
    if trace.is_labeled:
        return trace
    labeler = build_labeler(config, trace)
    logger.info(f"Labeling {len(trace)} steps of {Path(path).name}")
    return apply_labeler(trace, labeler)
