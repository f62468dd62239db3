"""
Attribute events of the synthetic domain and their natural-language rendering.

Every event describes one entity by four attributes (animal, shape, color,
number). A step line describes one or more entities; with several entities each
description is tagged "Entity N:". Propositions are named ``<attribute>_<value>``
and, with several entities, ``entity<N>_<attribute>_<value>``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

DATA_DIR = Path(__file__).resolve().parent / "data"

ATTRIBUTES: tuple[str, ...] = ("animal", "shape", "color", "number")

TEMPLATES: tuple[str, ...] = (
    "Observed {color_article} {color} {shape} (number {number}) alongside {animal_article} {animal}.",
    "{animal_article_cap} {animal} was seen near {color_article} {color} {shape} labeled {number}.",
    "Spotted number {number}: {color_article} {color} {shape} next to {animal_article} {animal}.",
    "{color_article_cap} {color} {shape} carrying the number {number} drifted past {animal_article} {animal}.",
)

ENTITY_TAG_RE = re.compile(r"Entity (\d+):")
PROPOSITION_NAME_RE = re.compile(r"^(?:entity(\d+)_)?(animal|shape|color|number)_([a-z0-9]+)$")
NUMBER_RE = re.compile(r"\b(\d{1,3})\b")


@dataclass(frozen=True)
class Vocabulary:
    animals: tuple[str, ...]
    shapes: tuple[str, ...]
    colors: tuple[str, ...]
    numbers: tuple[int, ...]

    @classmethod
    def load(cls, path: str | Path | None = None) -> Vocabulary:
        data = json.loads(Path(path or DATA_DIR / "vocabularies.json").read_text(encoding="utf-8"))
        numbers = data["numbers"]
        return cls(
            animals=tuple(data["animals"]),
            shapes=tuple(data["shapes"]),
            colors=tuple(data["colors"]),
            numbers=tuple(range(numbers["low"], numbers["high"] + 1)),
        )

    def values(self, attribute: str) -> tuple[str, ...]:
        if attribute == "number":
            return tuple(str(number) for number in self.numbers)
        return getattr(self, f"{attribute}s")

    def propositions(self, entities: int = 1) -> frozenset[str]:
        tags = [None] if entities == 1 else range(1, entities + 1)
        return frozenset(
            proposition(attribute, value, entity)
            for entity in tags
            for attribute in ATTRIBUTES
            for value in self.values(attribute)
        )


@lru_cache(maxsize=1)
def default_vocabulary() -> Vocabulary:
    return Vocabulary.load()


def proposition(attribute: str, value: str | int, entity: int | None = None) -> str:
    name = f"{attribute}_{value}"
    return f"entity{entity}_{name}" if entity is not None else name


def split_proposition(name: str) -> tuple[int | None, str, str]:
    """Inverse of ``proposition``: (entity or None, attribute, value)."""
    match = PROPOSITION_NAME_RE.match(name)
    if not match:
        raise ValueError(f"Not an attribute proposition: {name!r}")
    entity, attribute, value = match.groups()
    return (int(entity) if entity else None), attribute, value


@dataclass(frozen=True)
class AttributeEvent:
    entity: int
    animal: str
    shape: str
    color: str
    number: int

    def value(self, attribute: str) -> str:
        return str(getattr(self, attribute))

    def labels(self, tagged: bool = False) -> frozenset[str]:
        entity = self.entity if tagged else None
        return frozenset(proposition(attribute, self.value(attribute), entity) for attribute in ATTRIBUTES)

    def describe(self, template_index: int = 0) -> str:
        template = TEMPLATES[template_index % len(TEMPLATES)]
        return template.format(
            animal=self.animal,
            shape=self.shape,
            color=self.color,
            number=self.number,
            animal_article=_article(self.animal),
            animal_article_cap=_article(self.animal).capitalize(),
            color_article=_article(self.color),
            color_article_cap=_article(self.color).capitalize(),
        )


def _article(word: str) -> str:
    return "an" if word[0] in "aeiou" else "a"


def step_labels(events: list[AttributeEvent]) -> frozenset[str]:
    tagged = len(events) > 1
    return frozenset().union(*(event.labels(tagged) for event in events))


def render_step(events: list[AttributeEvent], t: int) -> str:
    """One step line; the sentence template cycles with the step index."""
    if len(events) == 1:
        return events[0].describe(t)
    return " ".join(f"Entity {event.entity}: {event.describe(t + event.entity)}" for event in events)


def parse_step(text: str, vocabulary: Vocabulary) -> list[AttributeEvent]:
    """Recover the events of a step line produced by ``render_step``."""
    parts = ENTITY_TAG_RE.split(text)
    if len(parts) == 1:
        chunks = [(1, text)]
    else:
        chunks = [(int(parts[index]), parts[index + 1]) for index in range(1, len(parts) - 1, 2)]

    events = []
    for entity, chunk in chunks:
        words = set(re.findall(r"[a-z]+", chunk.lower()))
        number = NUMBER_RE.search(chunk)
        found = {
            attribute: next((value for value in vocabulary.values(attribute) if value in words), None)
            for attribute in ("animal", "shape", "color")
        }
        if None in found.values() or number is None:
            continue
        events.append(AttributeEvent(entity=entity, number=int(number.group(1)), **found))
    return events
