"""
Monitoring patterns: named predicates over finite verdict sequences.

Configs refer to patterns by name; new ones are added with ``register_pattern``.
"""
from collections.abc import Callable, Sequence
from dataclasses import dataclass

from backend.apps.ltl.formula import Verdict

from .exceptions import UnknownPatternError


@dataclass(frozen=True)
class MonitoringPattern:
    name: str
    predicate: Callable[[Sequence[Verdict]], bool]
    description: str = ""

    def __call__(self, verdicts: Sequence[Verdict]) -> bool:
        if not verdicts:
            raise ValueError(f"Pattern {self.name} needs a nonempty verdict sequence")
        return bool(self.predicate(verdicts))


_REGISTRY: dict[str, MonitoringPattern] = {}


def register_pattern(
    name: str,
    predicate: Callable[[Sequence[Verdict]], bool],
    description: str = "",
    replace: bool = False,
) -> MonitoringPattern:
    if name in _REGISTRY and not replace:
        raise ValueError(f"Pattern {name!r} is already registered")
    pattern = MonitoringPattern(name, predicate, description)
    _REGISTRY[name] = pattern
    return pattern


def get_pattern(name: str) -> MonitoringPattern:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownPatternError(f"Unknown monitoring pattern {name!r}; known: {', '.join(pattern_names())}") from None


def pattern_names() -> list[str]:
    return sorted(_REGISTRY)


CONTAINS_VIOLATED = register_pattern(
    "contains_violated",
    lambda verdicts: Verdict.VIOLATED in verdicts,
    "some verdict in the sequence is Violated",
)
CONTAINS_SATISFIED = register_pattern(
    "contains_satisfied",
    lambda verdicts: Verdict.SATISFIED in verdicts,
    "some verdict in the sequence is Satisfied",
)
ENDS_VIOLATED = register_pattern(
    "ends_violated",
    lambda verdicts: verdicts[-1] is Verdict.VIOLATED,
    "the last verdict is Violated",
)
