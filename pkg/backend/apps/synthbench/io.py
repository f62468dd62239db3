"""
Bench files (JSONL, one case per line) and judge evaluation reports.
"""
import json
import logging
from collections.abc import Sequence
from pathlib import Path

from backend.apps.ltl.rendering import render
from backend.apps.traces.exceptions import TraceFormatError
from backend.apps.traces.records import StepRecord, Trace

from .generators import BenchCase
from .judges import JudgeEvaluation
from .serializers import BenchCaseSerializer

logger = logging.getLogger(__name__)


def case_to_dict(case: BenchCase) -> dict:
    return {
        "id": case.id,
        "suite": case.suite,
        "knobs": dict(case.knobs),
        "constraints": [render(phi) for phi in case.constraints],
        "truth": list(case.truth),
        "trace": [step.to_dict() for step in case.trace],
    }


def save_bench(cases: Sequence[BenchCase], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = (json.dumps(case_to_dict(case), ensure_ascii=False, sort_keys=True) for case in cases)
    path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
    logger.info(f"Wrote {len(cases)} bench cases to {path}")


def load_bench(path: str | Path) -> list[BenchCase]:
    path = Path(path)
    cases = []
    with path.open(encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as exc:
                raise TraceFormatError(f"malformed JSON at line {line_number}: {exc.msg}", line_number) from exc
            serializer = BenchCaseSerializer(data=payload)
            if not serializer.is_valid():
                errors = json.dumps(serializer.errors, ensure_ascii=False)
                raise TraceFormatError(f"invalid bench case at line {line_number}: {errors}", line_number)
            data = serializer.validated_data
            steps = tuple(
                StepRecord(t=step["t"], input=step["input"], output=step["output"], labels=step["labels"])
                for step in data["trace"]
            )
            cases.append(
                BenchCase(
                    id=data["id"],
                    suite=data["suite"],
                    trace=Trace(steps, {"case": data["id"]}),
                    constraints=tuple(data["constraints"]),
                    truth=tuple(data["truth"]),
                    knobs=dict(data["knobs"]),
                )
            )
    if not cases:
        raise TraceFormatError(f"empty bench file: {path}")
    logger.info(f"Loaded {len(cases)} bench cases from {path.name}")
    return cases


def write_eval_report(evaluation: JudgeEvaluation, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(evaluation.to_dict(), ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
