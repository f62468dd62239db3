"""
Reference semantics used as a test oracle for progression and the monitors.

Lasso words ``prefix · loop^ω`` have finitely many distinct positions, so the
satisfaction set of every subformula is computed bottom-up as a boolean vector
over those positions, with fixed points for until, eventually and always.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .exceptions import LassoError, LTLError
from .formula import (
    Always,
    And,
    Eventually,
    FalseLit,
    Formula,
    Implies,
    Next,
    Not,
    Or,
    Prop,
    TrueLit,
    TruthAssignment,
    Until,
)


@dataclass(frozen=True)
class LassoWord:
    """An ultimately periodic word ``prefix · loop^ω``."""
    prefix: tuple[TruthAssignment, ...]
    loop: tuple[TruthAssignment, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", tuple(frozenset(s) for s in self.prefix))
        object.__setattr__(self, "loop", tuple(frozenset(s) for s in self.loop))
        if not self.loop:
            raise LassoError("Lasso loop must be nonempty")

    @property
    def first(self) -> TruthAssignment:
        return self.prefix[0] if self.prefix else self.loop[0]

    def shifted(self) -> LassoWord:
        """The suffix starting at position 1."""
        if self.prefix:
            return LassoWord(self.prefix[1:], self.loop)
        return LassoWord((), self.loop[1:] + self.loop[:1])

    def extend(self, assignments: Iterable[Iterable[str]]) -> LassoWord:
        """This word with ``assignments`` prepended."""
        return LassoWord(tuple(frozenset(s) for s in assignments) + self.prefix, self.loop)

    def satisfies(self, phi: Formula) -> bool:
        return evaluate_lasso(phi, self.prefix, self.loop)


def evaluate_lasso(
    phi: Formula,
    prefix: Sequence[Iterable[str]],
    loop: Sequence[Iterable[str]],
) -> bool:
    """Whether ``prefix · loop^ω`` satisfies ``phi`` at position 0."""
    if not loop:
        raise LassoError("Lasso loop must be nonempty")
    word = [frozenset(s) for s in prefix] + [frozenset(s) for s in loop]
    successor = np.arange(1, len(word) + 1)
    successor[-1] = len(prefix)
    return bool(_lasso_vector(phi, word, successor, {})[0])


def _lasso_vector(phi: Formula, word: list, successor: np.ndarray, memo: dict) -> np.ndarray:
    if phi in memo:
        return memo[phi]

    def sub(child: Formula) -> np.ndarray:
        return _lasso_vector(child, word, successor, memo)

    match phi:
        case TrueLit():
            result = np.ones(len(word), dtype=bool)
        case FalseLit():
            result = np.zeros(len(word), dtype=bool)
        case Prop(name):
            result = np.array([name in step for step in word], dtype=bool)
        case Not(child):
            result = ~sub(child)
        case And(left, right):
            result = sub(left) & sub(right)
        case Or(left, right):
            result = sub(left) | sub(right)
        case Implies(left, right):
            result = ~sub(left) | sub(right)
        case Next(child):
            result = sub(child)[successor]
        case Until(left, right):
            result = _least_fixpoint(sub(left), sub(right), successor)
        case Eventually(child):
            result = _least_fixpoint(np.ones(len(word), dtype=bool), sub(child), successor)
        case Always(child):
            result = _greatest_fixpoint(sub(child), successor)
        case _:
            raise TypeError(f"Not a formula: {phi!r}")

    memo[phi] = result
    return result


def _least_fixpoint(hold: np.ndarray, release: np.ndarray, successor: np.ndarray) -> np.ndarray:
    current = release.copy()
    while True:
        updated = release | (hold & current[successor])
        if np.array_equal(updated, current):
            return current
        current = updated


def _greatest_fixpoint(hold: np.ndarray, successor: np.ndarray) -> np.ndarray:
    current = hold.copy()
    while True:
        updated = hold & current[successor]
        if np.array_equal(updated, current):
            return current
        current = updated


# FINITE WORDS


def evaluate_finite(phi: Formula, word: Sequence[Iterable[str]]) -> bool:
    """
    Finite-trace truth at position 0.

    Next is strong (there must be a next step), eventualities and until must be
    fulfilled inside the word, and always ranges over the remaining steps.
    """
    if not word:
        raise LTLError("Finite word must be nonempty")
    steps = [frozenset(s) for s in word]
    return bool(_finite_vector(phi, steps, {})[0])


def _finite_vector(phi: Formula, word: list, memo: dict) -> np.ndarray:
    if phi in memo:
        return memo[phi]

    def sub(child: Formula) -> np.ndarray:
        return _finite_vector(child, word, memo)

    size = len(word)
    match phi:
        case TrueLit():
            result = np.ones(size, dtype=bool)
        case FalseLit():
            result = np.zeros(size, dtype=bool)
        case Prop(name):
            result = np.array([name in step for step in word], dtype=bool)
        case Not(child):
            result = ~sub(child)
        case And(left, right):
            result = sub(left) & sub(right)
        case Or(left, right):
            result = sub(left) | sub(right)
        case Implies(left, right):
            result = ~sub(left) | sub(right)
        case Next(child):
            result = np.zeros(size, dtype=bool)
            result[:-1] = sub(child)[1:]
        case Eventually(child):
            result = np.logical_or.accumulate(sub(child)[::-1])[::-1]
        case Always(child):
            result = np.logical_and.accumulate(sub(child)[::-1])[::-1]
        case Until(left, right):
            hold, release = sub(left), sub(right)
            result = np.zeros(size, dtype=bool)
            later = False
            for i in range(size - 1, -1, -1):
                later = bool(release[i] or (hold[i] and later))
                result[i] = later
        case _:
            raise TypeError(f"Not a formula: {phi!r}")

    memo[phi] = result
    return result
