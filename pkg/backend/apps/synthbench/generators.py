"""
Seeded generators for the synthetic judging suites.

Every case is built so its truth is known at construction: required events are
placed at chosen steps, and all target propositions are masked out of the
random background events, so a formula can only be fulfilled where it was
placed. Unsatisfied eventuality cases place the path but never the final
proposition. Truth is then confirmed with finite-trace semantics.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from backend.apps.ltl.formula import Formula
from backend.apps.ltl.semantics import evaluate_finite
from backend.apps.traces.records import StepRecord, Trace

from .events import ATTRIBUTES, AttributeEvent, Vocabulary, default_vocabulary, proposition, render_step, split_proposition, step_labels
from .exceptions import KnobError, SynthbenchError
from .patterns import PATTERN_ROLES, PATTERNS, TREE_DEPTHS, build_tree, pattern_formula, tree_formula, tree_size

logger = logging.getLogger(__name__)

SUITES = ("elasticity", "constraints", "propositions", "spec")
FAMILIES = ("simple", "complex")
FAMILY_DEPTHS = {"simple": 0, "complex": 4}

MAX_GAP = 1000
MAX_CONSTRAINTS = 20
MAX_ENTITIES = 20
ELASTICITY_PADDING = 10
CONSTRAINT_SCALING_LENGTHS = {"simple": 500, "complex": 1000}
SIMPLE_GAP = 10
# approximate gaps of the complex family per constraint count
COMPLEX_GAPS = {1: 23, 5: 117, 10: 91, 20: 40}
PROPOSITION_SCALING_LENGTH = 100
SPEC_PATTERN_LENGTH = 200
# values per attribute that are never targets, so background draws stay possible
BACKGROUND_RESERVE = 4


@dataclass(frozen=True)
class BenchCase:
    id: str
    suite: str
    trace: Trace
    constraints: tuple[Formula, ...]
    truth: tuple[bool, ...]
    knobs: Mapping[str, Any] = field(default_factory=dict)

    @property
    def entities(self) -> int:
        return int(self.knobs.get("entities", 1))

    @property
    def group(self) -> str:
        """Key of the knob setting this case belongs to."""
        axis = {"elasticity": "gap", "constraints": "n", "propositions": "entities", "spec": "pattern"}[self.suite]
        return f"{self.suite}/{self.knobs.get('family', '-')}/{axis}={self.knobs.get(axis)}"


# TRACE CONSTRUCTION


class TraceBuilder:
    """Steps of attribute events with some attributes pinned and targets masked."""

    def __init__(self, rng: np.random.Generator, vocabulary: Vocabulary, length: int, entities: int = 1):
        self.rng = rng
        self.vocabulary = vocabulary
        self.length = length
        self.entities = entities
        self.pinned: dict[tuple[int, int], dict[str, str]] = defaultdict(dict)
        self.masked: dict[int, dict[str, set[str]]] = defaultdict(lambda: defaultdict(set))
        self.occupied: set[int] = set()

    def _resolve(self, name: str) -> tuple[int, str, str]:
        entity, attribute, value = split_proposition(name)
        return entity or 1, attribute, value

    def mask(self, names) -> None:
        for name in names:
            entity, attribute, value = self._resolve(name)
            self.masked[entity][attribute].add(value)

    def can_place(self, t: int, name: str) -> bool:
        entity, attribute, value = self._resolve(name)
        return 1 <= t <= self.length and self.pinned[(t, entity)].get(attribute, value) == value

    def place(self, t: int, name: str) -> None:
        if not self.can_place(t, name):
            raise SynthbenchError(f"Cannot place {name} at step {t}")
        entity, attribute, value = self._resolve(name)
        self.pinned[(t, entity)][attribute] = value
        self.occupied.add(t)

    def place_sequence(self, names: Sequence[str], steps: Sequence[int]) -> None:
        for name, t in zip(names, steps, strict=True):
            self.place(t, name)

    def _event(self, t: int, entity: int) -> AttributeEvent:
        pinned = self.pinned.get((t, entity), {})
        chosen = {}
        for attribute in ATTRIBUTES:
            if attribute in pinned:
                chosen[attribute] = pinned[attribute]
                continue
            banned = self.masked[entity][attribute]
            pool = [value for value in self.vocabulary.values(attribute) if value not in banned]
            chosen[attribute] = pool[int(self.rng.integers(len(pool)))]
        return AttributeEvent(
            entity=entity,
            animal=chosen["animal"],
            shape=chosen["shape"],
            color=chosen["color"],
            number=int(chosen["number"]),
        )

    def build(self, metadata: Mapping[str, Any] | None = None) -> Trace:
        steps = []
        for t in range(1, self.length + 1):
            events = [self._event(t, entity) for entity in range(1, self.entities + 1)]
            steps.append(StepRecord(t=t, input="", output=render_step(events, t), labels=step_labels(events)))
        return Trace(tuple(steps), dict(metadata or {}))


def target_pool(rng: np.random.Generator, vocabulary: Vocabulary, entities: int = 1) -> list[str]:
    """Propositions that may serve as targets; a few values per attribute stay background-only."""
    pool = []
    tags = [None] if entities == 1 else range(1, entities + 1)
    for entity in tags:
        for attribute in ATTRIBUTES:
            values = list(vocabulary.values(attribute))
            order = rng.permutation(len(values))
            pool.extend(proposition(attribute, values[index], entity) for index in order[BACKGROUND_RESERVE:])
    return sorted(pool)


def draw_targets(rng: np.random.Generator, pool: Sequence[str], count: int) -> list[str]:
    if count > len(pool):
        raise KnobError("propositions", count, f"only {len(pool)} target propositions available")
    return [pool[index] for index in rng.choice(len(pool), size=count, replace=False)]


def sorted_steps(rng: np.random.Generator, length: int, count: int) -> list[int]:
    """``count`` distinct steps in [1, length], ascending."""
    return sorted(int(step) + 1 for step in rng.choice(length, size=count, replace=False))


def _check_truth(case_id: str, constraints: Sequence[Formula], trace: Trace, intended: Sequence[bool]) -> tuple[bool, ...]:
    word = [step.labels for step in trace]
    truth = tuple(evaluate_finite(phi, word) for phi in constraints)
    if truth != tuple(intended):
        raise SynthbenchError(f"Case {case_id}: constructed truth {list(intended)} but the trace gives {list(truth)}")
    return truth


def _case_rngs(seed: int, count: int) -> list[np.random.Generator]:
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(count)]


def _check_family(family: str) -> int:
    if family not in FAMILIES:
        raise KnobError("family", family, f"expected one of {', '.join(FAMILIES)}")
    return FAMILY_DEPTHS[family]


def _check_count(count: int) -> None:
    if count < 1:
        raise KnobError("count", count, "must be positive")


# TEMPORAL ELASTICITY


def gen_elasticity(
    gap: int,
    family: str = "simple",
    seed: int = 0,
    count: int = 40,
    vocabulary: Vocabulary | None = None,
) -> list[BenchCase]:
    """
    A balanced batch where consecutive path events are exactly ``gap`` steps
    apart; the trace is padded so it grows with the gap.
    """
    depth = _check_family(family)
    if not isinstance(gap, int) or not 1 <= gap <= MAX_GAP:
        raise KnobError("gap", gap, f"must be an integer in [1, {MAX_GAP}]")
    _check_count(count)
    vocabulary = vocabulary or default_vocabulary()

    span = (depth + 1) * gap + 1
    length = span + 2 * ELASTICITY_PADDING
    cases = []
    for index, rng in enumerate(_case_rngs(seed, count)):
        satisfied = index % 2 == 0
        targets = draw_targets(rng, target_pool(rng, vocabulary), tree_size(depth))
        tree = build_tree(targets, depth)
        phi = tree_formula(tree)

        builder = TraceBuilder(rng, vocabulary, length)
        builder.mask(targets)
        path = tree.random_path(rng)
        start = int(rng.integers(1, ELASTICITY_PADDING + 1))
        placed = path if satisfied else path[:-1]
        builder.place_sequence(placed, [start + offset * gap for offset in range(len(placed))])

        case_id = f"elasticity-{family}-gap{gap}-s{seed}-{index}"
        knobs = {"family": family, "gap": gap, "seed": seed, "index": index}
        trace = builder.build({"case": case_id})
        cases.append(BenchCase(case_id, "elasticity", trace, (phi,), _check_truth(case_id, [phi], trace, [satisfied]), knobs))

    logger.info(f"Generated {len(cases)} elasticity cases (family={family}, gap={gap}, length={length})")
    return cases


# CONSTRAINT SCALABILITY


def complex_gap(n: int) -> int:
    """Default complex-family gap: the entry for the largest listed count not above ``n``."""
    return COMPLEX_GAPS[max(key for key in COMPLEX_GAPS if key <= n)]


def gen_constraint_scaling(
    n: int,
    family: str = "simple",
    seed: int = 0,
    gap: int | None = None,
    satisfied: Sequence[bool] | None = None,
    vocabulary: Vocabulary | None = None,
) -> BenchCase:
    """
    ``n`` constraints of the same shape on one fixed-length trace, each
    satisfied independently with probability 0.5 unless ``satisfied`` is given.
    Simple-family constraints use disjoint propositions. Complex-family trees
    need far more nodes than the vocabulary holds at n=20, so they share
    their intermediate propositions and only the final propositions are
    distinct per constraint.
    """
    depth = _check_family(family)
    if not isinstance(n, int) or not 1 <= n <= MAX_CONSTRAINTS:
        raise KnobError("n", n, f"must be an integer in [1, {MAX_CONSTRAINTS}]")
    if satisfied is not None and len(satisfied) != n:
        raise KnobError("satisfied", satisfied, f"needs one entry per constraint ({n})")
    vocabulary = vocabulary or default_vocabulary()
    gap = gap or (SIMPLE_GAP if family == "simple" else complex_gap(n))
    length = CONSTRAINT_SCALING_LENGTHS[family]
    span = (depth + 1) * gap + 1
    if span > length:
        raise KnobError("gap", gap, f"a path spanning {span} steps does not fit in {length}")

    rng = np.random.default_rng(seed)
    intended = [bool(value) for value in (satisfied if satisfied is not None else rng.random(n) < 0.5)]
    pool = target_pool(rng, vocabulary)
    size = tree_size(depth)
    if family == "simple":
        names = draw_targets(rng, pool, size * n)
        groups = [names[index * size:(index + 1) * size] for index in range(n)]
    else:
        finals = draw_targets(rng, pool, n)
        rest = [name for name in pool if name not in set(finals)]
        groups = [draw_targets(rng, rest, size - 1) + [final] for final in finals]

    builder = TraceBuilder(rng, vocabulary, length)
    builder.mask({name for group in groups for name in group})
    constraints = []
    for index, group in enumerate(groups):
        tree = build_tree(group, depth)
        constraints.append(tree_formula(tree))
        path = tree.random_path(rng)
        placed = path if intended[index] else path[:-1]
        offsets = [offset * gap for offset in range(len(placed))]
        starts = [
            start for start in range(1, length - span + 2)
            if not any(start + offset in builder.occupied for offset in offsets)
        ]
        if not starts:
            raise KnobError("n", n, f"no room left for constraint {index + 1} in {length} steps")
        start = starts[int(rng.integers(len(starts)))]
        builder.place_sequence(placed, [start + offset for offset in offsets])

    case_id = f"constraints-{family}-n{n}-s{seed}"
    knobs = {"family": family, "n": n, "gap": gap, "seed": seed}
    trace = builder.build({"case": case_id})
    truth = _check_truth(case_id, constraints, trace, intended)
    logger.info(f"Generated constraint-scaling case {case_id}: {sum(truth)}/{n} satisfied")
    return BenchCase(case_id, "constraints", trace, tuple(constraints), truth, knobs)


# PROPOSITION SCALABILITY


def gen_proposition_scaling(
    entities: int,
    family: str = "simple",
    seed: int = 0,
    satisfied: bool | None = None,
    length: int = PROPOSITION_SCALING_LENGTH,
    vocabulary: Vocabulary | None = None,
) -> BenchCase:
    """
    Steps describing ``entities`` tagged entities; the constraint targets
    attributes of particular entities and every other entity is a distractor.
    """
    depth = _check_family(family)
    if not isinstance(entities, int) or not 1 <= entities <= MAX_ENTITIES:
        raise KnobError("entities", entities, f"must be an integer in [1, {MAX_ENTITIES}]")
    vocabulary = vocabulary or default_vocabulary()
    size = tree_size(depth)
    if length < size:
        raise KnobError("length", length, f"needs at least {size} steps")

    rng = np.random.default_rng(seed)
    intended = bool(rng.random() < 0.5) if satisfied is None else satisfied
    targets = draw_targets(rng, target_pool(rng, vocabulary, entities), size)
    tree = build_tree(targets, depth)
    phi = tree_formula(tree)

    builder = TraceBuilder(rng, vocabulary, length, entities)
    builder.mask(targets)
    path = tree.random_path(rng)
    placed = path if intended else path[:-1]
    builder.place_sequence(placed, sorted_steps(rng, length, len(placed)))

    case_id = f"propositions-{family}-e{entities}-s{seed}"
    knobs = {"family": family, "entities": entities, "seed": seed}
    trace = builder.build({"case": case_id, "entities": entities})
    truth = _check_truth(case_id, [phi], trace, [intended])
    return BenchCase(case_id, "propositions", trace, (phi,), truth, knobs)


# SPECIFICATION PATTERNS


def _place_pattern(builder: TraceBuilder, rng: np.random.Generator, pattern: str, roles: Mapping[str, str], satisfied: bool) -> None:
    length = builder.length
    match pattern:
        case "universality":
            breaks = set() if satisfied else set(sorted_steps(rng, length, int(rng.integers(1, 4))))
            for t in range(1, length + 1):
                if t not in breaks:
                    builder.place(t, roles["P"])
        case "absence":
            if not satisfied:
                for t in sorted_steps(rng, length, int(rng.integers(1, 4))):
                    builder.place(t, roles["P"])
        case "response":
            pairs = int(rng.integers(1, 4))
            steps = sorted_steps(rng, length, 2 * pairs)
            order = [roles["P"], roles["S"]] * pairs
            if not satisfied:
                steps, order = steps[:-1], order[:-1]
            builder.place_sequence(order, steps)
        case "absence_between":
            order = ["Q", "R", "P"] if satisfied else ["Q", "P", "R"]
            builder.place_sequence([roles[role] for role in order], sorted_steps(rng, length, 3))
        case "constrained_response":
            order = ["P", "R", "Q"] if satisfied else ["P", "Q", "R"]
            builder.place_sequence([roles[role] for role in order], sorted_steps(rng, length, 3))


def gen_spec_patterns(
    pattern: str,
    seed: int = 0,
    count: int = 40,
    length: int = SPEC_PATTERN_LENGTH,
    vocabulary: Vocabulary | None = None,
) -> list[BenchCase]:
    """A balanced batch for one of the seven specification patterns."""
    if pattern not in PATTERNS:
        raise KnobError("pattern", pattern, f"expected one of {', '.join(PATTERNS)}")
    _check_count(count)
    vocabulary = vocabulary or default_vocabulary()

    cases = []
    for index, rng in enumerate(_case_rngs(seed, count)):
        satisfied = index % 2 == 0
        builder = TraceBuilder(rng, vocabulary, length)
        if pattern in TREE_DEPTHS:
            targets = draw_targets(rng, target_pool(rng, vocabulary), tree_size(TREE_DEPTHS[pattern]))
            tree = build_tree(targets, TREE_DEPTHS[pattern])
            phi = tree_formula(tree)
            builder.mask(targets)
            path = tree.random_path(rng)
            placed = path if satisfied else path[:-1]
            builder.place_sequence(placed, sorted_steps(rng, length, len(placed)))
        else:
            roles = dict(zip(PATTERN_ROLES[pattern], draw_targets(rng, target_pool(rng, vocabulary), len(PATTERN_ROLES[pattern])), strict=True))
            phi = pattern_formula(pattern, roles)
            builder.mask(roles.values())
            _place_pattern(builder, rng, pattern, roles, satisfied)

        case_id = f"spec-{pattern}-s{seed}-{index}"
        knobs = {"pattern": pattern, "seed": seed, "index": index}
        trace = builder.build({"case": case_id})
        cases.append(BenchCase(case_id, "spec", trace, (phi,), _check_truth(case_id, [phi], trace, [satisfied]), knobs))

    logger.info(f"Generated {len(cases)} specification-pattern cases ({pattern})")
    return cases
