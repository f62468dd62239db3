"""
Seeded random formulas and lasso words for fuzzing monitors.
"""
from collections.abc import Sequence
from itertools import combinations, product

import numpy as np

from .formula import (
    FALSE,
    TRUE,
    Always,
    And,
    Eventually,
    Formula,
    Implies,
    Next,
    Not,
    Or,
    Prop,
    TruthAssignment,
    Until,
)
from .semantics import LassoWord

UNARY_KINDS = (Not, Next, Eventually, Always)
BINARY_KINDS = (And, Or, Implies, Until)


def random_formula(
    rng: np.random.Generator,
    propositions: Sequence[str],
    max_depth: int = 5,
    leaf_probability: float = 0.3,
    literal_probability: float = 0.05,
) -> Formula:
    """Draw a formula of depth at most ``max_depth`` over ``propositions``."""
    if max_depth <= 0 or rng.random() < leaf_probability:
        if rng.random() < literal_probability:
            return TRUE if rng.random() < 0.5 else FALSE
        return Prop(str(rng.choice(propositions)))

    kind_index = int(rng.integers(len(UNARY_KINDS) + len(BINARY_KINDS)))
    if kind_index < len(UNARY_KINDS):
        child = random_formula(rng, propositions, max_depth - 1, leaf_probability, literal_probability)
        return UNARY_KINDS[kind_index](child)
    kind = BINARY_KINDS[kind_index - len(UNARY_KINDS)]
    left = random_formula(rng, propositions, max_depth - 1, leaf_probability, literal_probability)
    right = random_formula(rng, propositions, max_depth - 1, leaf_probability, literal_probability)
    return kind(left, right)


def random_assignment(rng: np.random.Generator, propositions: Sequence[str]) -> TruthAssignment:
    mask = rng.random(len(propositions)) < 0.5
    return frozenset(name for name, present in zip(propositions, mask, strict=True) if present)


def random_lasso(
    rng: np.random.Generator,
    propositions: Sequence[str],
    max_prefix: int = 6,
    max_loop: int = 3,
) -> LassoWord:
    prefix_length = int(rng.integers(0, max_prefix + 1))
    loop_length = int(rng.integers(1, max_loop + 1))
    return LassoWord(
        tuple(random_assignment(rng, propositions) for _ in range(prefix_length)),
        tuple(random_assignment(rng, propositions) for _ in range(loop_length)),
    )


def all_assignments(propositions: Sequence[str]) -> list[TruthAssignment]:
    """Every subset of ``propositions``, smallest first."""
    return [
        frozenset(subset)
        for size in range(len(propositions) + 1)
        for subset in combinations(propositions, size)
    ]


def all_words(propositions: Sequence[str], length: int) -> list[tuple[TruthAssignment, ...]]:
    return list(product(all_assignments(propositions), repeat=length))


def all_lassos(propositions: Sequence[str], max_loop: int) -> list[LassoWord]:
    """Every lasso with empty prefix and a loop of length 1..``max_loop``."""
    return [
        LassoWord((), loop)
        for length in range(1, max_loop + 1)
        for loop in all_words(propositions, length)
    ]
