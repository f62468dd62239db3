"""
Trace JSONL files and verdict report documents.
"""
import json
import logging
from collections.abc import Sequence
from pathlib import Path

from backend.apps.ltl.formula import Verdict

from .exceptions import TraceFormatError
from .records import StepRecord, Trace, VerdictReport, WitnessEntry
from .serializers import MetadataLineSerializer, ReportDocumentSerializer, StepSerializer

logger = logging.getLogger(__name__)


def _errors_text(errors) -> str:
    return json.dumps(errors, ensure_ascii=False)


# TRACES


def load_trace(path: str | Path) -> Trace:
    """
    Read a JSONL trace.

    An optional first line ``{"meta": {...}}`` carries free-form metadata.
    Blank lines are skipped; line numbers in errors are physical lines.
    """
    path = Path(path)
    steps: list[StepRecord] = []
    metadata: dict = {}

    with path.open(encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as exc:
                raise TraceFormatError(f"malformed JSON at line {line_number}: {exc.msg}", line_number) from exc

            if isinstance(payload, dict) and "meta" in payload:
                if steps or metadata:
                    raise TraceFormatError(f"metadata line must come first (line {line_number})", line_number)
                meta = MetadataLineSerializer(data=payload)
                if not meta.is_valid():
                    raise TraceFormatError(
                        f"invalid metadata at line {line_number}: {_errors_text(meta.errors)}", line_number
                    )
                metadata = dict(meta.validated_data["meta"])
                continue

            serializer = StepSerializer(data=payload)
            if not serializer.is_valid():
                raise TraceFormatError(
                    f"invalid step at line {line_number}: {_errors_text(serializer.errors)}", line_number
                )
            data = serializer.validated_data
            if data["t"] != len(steps) + 1:
                raise TraceFormatError(f"non-contiguous step index at line {line_number}", line_number)
            steps.append(StepRecord(t=data["t"], input=data["input"], output=data["output"], labels=data["labels"]))

    if not steps:
        raise TraceFormatError(f"empty trace file: {path}")

    logger.info(f"Loaded trace {path.name} with {len(steps)} steps")
    return Trace(tuple(steps), metadata)


def trace_lines(trace: Trace) -> list[str]:
    lines = []
    if trace.metadata:
        lines.append(json.dumps({"meta": dict(trace.metadata)}, ensure_ascii=False, sort_keys=True))
    lines.extend(json.dumps(step.to_dict(), ensure_ascii=False) for step in trace)
    return lines


def save_trace(trace: Trace, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(f"{line}\n" for line in trace_lines(trace)), encoding="utf-8")


# REPORTS


def reports_document(reports: Sequence[VerdictReport], mode: str) -> dict:
    steps = len(reports[0].verdicts) if reports else 0
    return {
        "mode": mode,
        "steps": steps,
        "reports": [report.to_dict() for report in reports],
    }


def dump_reports(reports: Sequence[VerdictReport], path: str | Path, mode: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = reports_document(reports, mode)
    path.write_text(json.dumps(document, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    logger.info(f"Wrote {len(reports)} reports to {path}")


def load_reports(path: str | Path) -> list[VerdictReport]:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"malformed report document {path}: {exc.msg}", exc.lineno) from exc

    serializer = ReportDocumentSerializer(data=payload)
    if not serializer.is_valid():
        raise TraceFormatError(f"invalid report document {path}: {_errors_text(serializer.errors)}")

    reports = []
    for data in serializer.validated_data["reports"]:
        witnesses = tuple(
            tuple(WitnessEntry(**entry) for entry in witness)
            for witness in data["witnesses"]
        )
        reports.append(
            VerdictReport(
                constraint_id=data["constraint_id"],
                verdicts=tuple(Verdict(value) for value in data["verdicts"]),
                violations=data["violations"],
                satisfactions=data["satisfactions"],
                witnesses=witnesses,
            )
        )
    return reports
