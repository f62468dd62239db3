"""
Intervention policy: when to intervene and how.
"""
from dataclasses import asdict, dataclass, field

from django.conf import settings

from backend.apps.predictive.exceptions import UnknownPatternError
from backend.apps.predictive.patterns import get_pattern

from .exceptions import PolicyError

STRATEGIES = ("none", "resample", "inject", "switch")


@dataclass(frozen=True)
class InterventionPolicy:
    strategy: str = "none"
    tau: float = field(default_factory=lambda: settings.TRAC_INTERVENTION_THRESHOLD)
    n: int = field(default_factory=lambda: settings.TRAC_RESAMPLE_CANDIDATES)
    k: int = field(default_factory=lambda: settings.TRAC_PREDICTIVE_HORIZON)
    m: int = field(default_factory=lambda: settings.TRAC_PREDICTIVE_SAMPLES)
    pattern: str = "contains_violated"
    substitute_model: str | None = None
    template_path: str | None = None

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise PolicyError(f"Unknown strategy {self.strategy!r}; expected one of {', '.join(STRATEGIES)}")
        if not 0.0 <= self.tau <= 1.0:
            raise PolicyError(f"Threshold must lie in [0, 1], got {self.tau}")
        if self.n < 1 or self.k < 1 or self.m < 1:
            raise PolicyError(f"n, k and m must be positive (n={self.n}, k={self.k}, m={self.m})")
        try:
            get_pattern(self.pattern)
        except UnknownPatternError as exc:
            raise PolicyError(str(exc)) from exc

    @property
    def active(self) -> bool:
        return self.strategy != "none"

    def to_dict(self) -> dict:
        return asdict(self)
