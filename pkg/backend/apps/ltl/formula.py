"""
LTL abstract syntax.

Formulas are immutable trees of the node classes below. Each node caches its
structural hash on construction, so equality checks between large residuals
fail fast on a hash mismatch and succeed at once on shared subtrees.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import ClassVar

TruthAssignment = frozenset[str]

PROPOSITION_RE = re.compile(r"^[A-Za-z0-9_]+$")

# Operator keywords of the ascii grammar; a proposition with one of these names
# could not be written back as text.
RESERVED_NAMES = frozenset({"G", "F", "X", "U", "true", "false"})


class Verdict(Enum):
    """Three-valued (LTL3) monitor output."""
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"

    @property
    def is_terminal(self) -> bool:
        return self is not Verdict.INCONCLUSIVE

    @property
    def label(self) -> str:
        return self.value.capitalize()


class Formula:
    """Base class of all formula nodes."""
    __slots__ = ("_hash",)

    arity: ClassVar[int] = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((type(self).__name__, *self.children())))

    def children(self) -> tuple:
        return tuple(getattr(self, name) for name in self.__match_args__)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(other) is not type(self) or self._hash != other._hash:
            return False
        return self.children() == other.children()

    def __ne__(self, other: object) -> bool:
        return not self == other

    def __str__(self) -> str:
        from .rendering import render
        return render(self, "ascii")


@dataclass(frozen=True, slots=True, eq=False)
class TrueLit(Formula):
    pass


@dataclass(frozen=True, slots=True, eq=False)
class FalseLit(Formula):
    pass


@dataclass(frozen=True, slots=True, eq=False)
class Prop(Formula):
    name: str

    def __post_init__(self) -> None:
        if not PROPOSITION_RE.match(self.name) or self.name in RESERVED_NAMES:
            raise ValueError(f"Invalid proposition name: {self.name!r}")
        Formula.__post_init__(self)


@dataclass(frozen=True, slots=True, eq=False)
class Not(Formula):
    child: Formula
    arity: ClassVar[int] = 1


@dataclass(frozen=True, slots=True, eq=False)
class And(Formula):
    left: Formula
    right: Formula
    arity: ClassVar[int] = 2


@dataclass(frozen=True, slots=True, eq=False)
class Or(Formula):
    left: Formula
    right: Formula
    arity: ClassVar[int] = 2


@dataclass(frozen=True, slots=True, eq=False)
class Implies(Formula):
    left: Formula
    right: Formula
    arity: ClassVar[int] = 2


@dataclass(frozen=True, slots=True, eq=False)
class Next(Formula):
    child: Formula
    arity: ClassVar[int] = 1


@dataclass(frozen=True, slots=True, eq=False)
class Until(Formula):
    left: Formula
    right: Formula
    arity: ClassVar[int] = 2


@dataclass(frozen=True, slots=True, eq=False)
class Eventually(Formula):
    child: Formula
    arity: ClassVar[int] = 1


@dataclass(frozen=True, slots=True, eq=False)
class Always(Formula):
    child: Formula
    arity: ClassVar[int] = 1


TRUE = TrueLit()
FALSE = FalseLit()

UNARY = (Not, Next, Eventually, Always)
BINARY = (And, Or, Implies, Until)


def size(phi: Formula) -> int:
    """Node count."""
    if isinstance(phi, Prop):
        return 1
    return 1 + sum(size(child) for child in phi.children())


def propositions(phi: Formula) -> frozenset[str]:
    if isinstance(phi, Prop):
        return frozenset({phi.name})
    if isinstance(phi, (TrueLit, FalseLit)):
        return frozenset()
    return frozenset().union(*(propositions(child) for child in phi.children()))


def conjoin(*parts: Formula) -> Formula:
    """Right-nested conjunction; TRUE for no parts."""
    if not parts:
        return TRUE
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = And(part, result)
    return result


def disjoin(*parts: Formula) -> Formula:
    """Right-nested disjunction; FALSE for no parts."""
    if not parts:
        return FALSE
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = Or(part, result)
    return result


def to_tree(phi: Formula) -> dict:
    """Nested ``{"op", "args"}`` dump of the syntax tree; propositions carry ``name``."""
    if isinstance(phi, Prop):
        return {"op": "Prop", "name": phi.name}
    return {"op": type(phi).__name__, "args": [to_tree(child) for child in phi.children()]}
