"""
Constraint shapes of the synthetic suites and their natural-language wording.

The scaling suites use eventuality trees: a root proposition followed (at a
strictly later step) by one of its children, recursively, down to a shared
leaf. The simple formula F(A & X F B) is the one-path tree. The specification
suite adds five property-pattern shapes. ``render_constraint`` recognizes a
formula's shape and words it at one of three precision levels.
"""
from __future__ import annotations

from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from backend.apps.ltl.formula import (
    Always,
    And,
    Eventually,
    Formula,
    Implies,
    Next,
    Not,
    Or,
    Prop,
    Until,
    conjoin,
    disjoin,
)
from backend.apps.ltl.rendering import render

from .events import split_proposition
from .exceptions import KnobError, UnknownPatternError

LEVELS = ("informal", "precise", "precise+ltl")

PATTERNS = (
    "universality",
    "absence",
    "response",
    "absence_between",
    "constrained_response",
    "tree_b2_d1",
    "tree_b2_d4",
)

# roles of the non-tree patterns, in the order their propositions are drawn
PATTERN_ROLES: Mapping[str, tuple[str, ...]] = {
    "universality": ("P",),
    "absence": ("P",),
    "response": ("P", "S"),
    "absence_between": ("P", "Q", "R"),
    "constrained_response": ("P", "Q", "R"),
}

TREE_DEPTHS: Mapping[str, int] = {"tree_b2_d1": 1, "tree_b2_d4": 4}


# EVENTUALITY TREES


@dataclass(frozen=True)
class TreeNode:
    proposition: str
    children: tuple[TreeNode, ...] = ()

    @property
    def depth(self) -> int:
        """Branching levels above the leaf."""
        if not self.children:
            return -1
        return 1 + max(child.depth for child in self.children)

    def paths(self) -> list[tuple[str, ...]]:
        """Every root-to-leaf proposition sequence, left to right."""
        if not self.children:
            return [(self.proposition,)]
        return [(self.proposition, *path) for child in self.children for path in child.paths()]

    def random_path(self, rng: np.random.Generator) -> tuple[str, ...]:
        node, path = self, [self.proposition]
        while node.children:
            node = node.children[int(rng.integers(len(node.children)))]
            path.append(node.proposition)
        return tuple(path)

    def walk(self) -> Iterator[TreeNode]:
        yield self
        for child in self.children:
            yield from child.walk()


def tree_size(depth: int, branching: int = 2) -> int:
    """Distinct propositions of a full tree: internal nodes plus the shared leaf."""
    return sum(branching**level for level in range(depth + 1)) + 1


def build_tree(names: Sequence[str], depth: int, branching: int = 2) -> TreeNode:
    """
    Full ``branching``-ary tree with ``depth`` branching levels; the last name
    is the leaf that ends every path. Depth 0 is the simple two-step sequence.
    """
    if len(names) != tree_size(depth, branching):
        raise KnobError("propositions", len(names), f"a depth-{depth} tree needs {tree_size(depth, branching)}")
    leaf = TreeNode(names[-1])
    remaining = iter(names[:-1])

    def grow(level: int) -> TreeNode:
        name = next(remaining)
        if level == depth:
            return TreeNode(name, (leaf,))
        return TreeNode(name, tuple(grow(level + 1) for _ in range(branching)))

    return grow(0)


def _body(node: TreeNode) -> Formula:
    if not node.children:
        return Prop(node.proposition)
    return And(Prop(node.proposition), Next(Eventually(disjoin(*(_body(child) for child in node.children)))))


def tree_formula(tree: TreeNode) -> Formula:
    return Eventually(_body(tree))


def sequence_formula(first: str, second: str) -> Formula:
    """F(first & X F second)."""
    return tree_formula(TreeNode(first, (TreeNode(second),)))


def _alternatives(phi: Formula) -> list[Formula]:
    if isinstance(phi, Or):
        return _alternatives(phi.left) + _alternatives(phi.right)
    return [phi]


def _as_node(phi: Formula) -> TreeNode | None:
    match phi:
        case Prop(name):
            return TreeNode(name)
        case And(Prop(name), Next(Eventually(rest))):
            children = [_as_node(option) for option in _alternatives(rest)]
            if any(child is None for child in children):
                return None
            return TreeNode(name, tuple(children))
    return None


def as_tree(phi: Formula) -> TreeNode | None:
    """The eventuality tree ``phi`` encodes, or None."""
    if not isinstance(phi, Eventually):
        return None
    tree = _as_node(phi.child)
    if tree is None or not tree.children:
        return None
    return tree


def _is_full_binary(tree: TreeNode) -> bool:
    depth = tree.depth
    leaves = {path[-1] for path in tree.paths()}
    if len(leaves) != 1:
        return False

    def check(node: TreeNode, level: int) -> bool:
        if level == depth:
            return len(node.children) == 1 and not node.children[0].children
        return len(node.children) == 2 and all(check(child, level + 1) for child in node.children)

    return check(tree, 0)


# PROPERTY PATTERNS


def pattern_formula(pattern: str, bindings: Mapping[str, str]) -> Formula:
    """The formula of a non-tree pattern with its roles bound to propositions."""
    if pattern not in PATTERN_ROLES:
        raise UnknownPatternError(f"Unknown pattern {pattern!r}; known: {', '.join(PATTERN_ROLES)}")
    p = Prop(bindings["P"])
    match pattern:
        case "universality":
            return Always(p)
        case "absence":
            return Always(Not(p))
        case "response":
            return Always(Implies(p, Eventually(Prop(bindings["S"]))))
        case "absence_between":
            q, r = Prop(bindings["Q"]), Prop(bindings["R"])
            return Always(Implies(conjoin(q, Not(r), Eventually(r)), Until(Not(p), r)))
        case "constrained_response":
            q, r = Prop(bindings["Q"]), Prop(bindings["R"])
            return Always(Implies(p, Until(Not(q), r)))
    raise AssertionError(pattern)


def identify_pattern(phi: Formula) -> tuple[str, dict[str, str] | TreeNode]:
    """
    Name the shape of ``phi``: a property pattern with its role bindings, or
    "sequence" / "tree_b2_d<N>" / "tree" with the decoded tree.
    """
    match phi:
        case Always(Prop(p)):
            return "universality", {"P": p}
        case Always(Not(Prop(p))):
            return "absence", {"P": p}
        case Always(Implies(Prop(p), Eventually(Prop(s)))):
            return "response", {"P": p, "S": s}
        case Always(Implies(And(Prop(q), And(Not(Prop(r1)), Eventually(Prop(r2)))), Until(Not(Prop(p)), Prop(r3)))) if r1 == r2 == r3:
            return "absence_between", {"P": p, "Q": q, "R": r1}
        case Always(Implies(Prop(p), Until(Not(Prop(q)), Prop(r)))):
            return "constrained_response", {"P": p, "Q": q, "R": r}

    tree = as_tree(phi)
    if tree is None:
        raise UnknownPatternError(f"No known constraint pattern matches {render(phi)}")
    if len(tree.paths()) == 1 and len(tree.paths()[0]) == 2:
        return "sequence", tree
    if _is_full_binary(tree):
        return f"tree_b2_d{tree.depth}", tree
    return "tree", tree


# WORDING


def _parts(name: str) -> tuple[str, str, str]:
    """(owner, attribute, value) of an attribute proposition."""
    try:
        entity, attribute, value = split_proposition(name)
    except ValueError:
        return "the", "event", name.replace("_", " ")
    return ("the" if entity is None else f"Entity {entity}'s"), attribute, value


def _article(word: str) -> str:
    return "an" if word[0] in "aeiou" else "a"


def _object(attribute: str, value: str) -> str:
    if attribute in ("animal", "shape"):
        return f"{_article(value)} {value}"
    return value


def _noun(name: str) -> str:
    """Informal noun phrase: "an owl", "a green item", "the number 19"."""
    owner, attribute, value = _parts(name)
    match attribute:
        case "animal" | "shape":
            noun = f"{_article(value)} {value}"
        case "color":
            noun = f"{_article(value)} {value} item"
        case "number":
            noun = f"the number {value}"
        case _:
            noun = value
    if owner != "the":
        return f"{noun} as {owner[:-2]}"
    return noun


def _state(name: str, adverb: str = "") -> str:
    """Informal state: "the animal is a salmon", "Entity 1's color is olive"."""
    owner, attribute, value = _parts(name)
    verb = f"is {adverb} " if adverb else "is "
    return f"{owner} {attribute} {verb}{_object(attribute, value)}"


def _precise(name: str) -> str:
    """Precise noun phrase: 'the animal "owl"', "a triangle shape", "the color blue"."""
    owner, attribute, value = _parts(name)
    if owner != "the":
        return f'{owner} {attribute} "{value}"'
    match attribute:
        case "animal":
            return f'the animal "{value}"'
        case "shape":
            return f"{_article(value)} {value} shape"
    return f"the {attribute} {value}"


def _capitalized(text: str) -> str:
    return text[0].upper() + text[1:]


def _informal_tree(tree: TreeNode) -> str:
    if len(tree.paths()) == 1:
        first, second = tree.paths()[0][:2]
        return f"Eventually {_state(first)}, and then eventually {_state(second)}."

    leaf = tree.paths()[0][-1]
    children = " or ".join(_noun(child.proposition) for child in tree.children)
    if tree.depth == 1:
        return f"At some point {_noun(tree.proposition)} should appear, followed by either {children}, and then {_noun(leaf)}."

    sentences = [f"At some point {_noun(tree.proposition)} should appear, followed by either {children}."]
    for node in tree.walk():
        if node is tree or len(node.children) < 2:
            continue
        options = " or ".join(_noun(child.proposition) for child in node.children)
        sentences.append(f"If {_noun(node.proposition)}, then either {options}.")
    sentences.append(f"Everything ends with {_noun(leaf)}.")
    return " ".join(sentences)


def _precise_branch(children: Sequence[TreeNode]) -> str:
    if len(children) == 1:
        return _precise_clause(children[0])
    return "either: " + " or ".join(f"({_precise_clause(child)})" for child in children)


def _precise_clause(node: TreeNode) -> str:
    if not node.children:
        return f"{_precise(node.proposition)} appears"
    return f"{_precise(node.proposition)} appears, and then at some strictly later time step, {_precise_branch(node.children)}"


def _precise_tree(tree: TreeNode) -> str:
    return (
        f"At some time step, {_precise(tree.proposition)} must appear, and then at some strictly later "
        f"time step, {_precise_branch(tree.children)}."
    )


def _informal(pattern: str, roles) -> str:
    match pattern:
        case "universality":
            return _capitalized(_state(roles["P"], "always")) + "."
        case "absence":
            return f"{_capitalized(_noun(roles['P']))} never appears."
        case "response":
            return f"Whenever {_noun(roles['P'])} appears, {_noun(roles['S'])} should eventually appear too."
        case "absence_between":
            return f"{_capitalized(_noun(roles['P']))} should not occur between {_noun(roles['Q'])} and {_noun(roles['R'])}."
        case "constrained_response":
            return f"Whenever {_noun(roles['P'])} appears, {_noun(roles['Q'])} should not appear until {_noun(roles['R'])} appears."
    return _informal_tree(roles)


def _precise_text(pattern: str, roles) -> str:
    match pattern:
        case "universality":
            owner, attribute, value = _parts(roles["P"])
            return f"At every time step in the trace, {owner} {attribute} must be {_object(attribute, value)}."
        case "absence":
            return f"At no time step in the trace does {_precise(roles['P'])} appear."
        case "response":
            return (
                f"It is always the case that for every occurrence of {_precise(roles['P'])}, "
                f"{_precise(roles['S'])} must occur at the same time step or at a later time step."
            )
        case "absence_between":
            p, q, r = (_precise(roles[role]) for role in ("P", "Q", "R"))
            return (
                f"It is always the case that if {q} appears at a time step where {r} does not appear, "
                f"and {r} will appear at some future time step, then {p} must not appear at any time step "
                f"from that point until {r} appears."
            )
        case "constrained_response":
            p, q, r = (_precise(roles[role]) for role in ("P", "Q", "R"))
            return (
                f"It is always the case that whenever {p} appears, {q} must not appear at any time step "
                f"from that point until {r} appears. For every occurrence of {p}, {r} must eventually "
                f"appear at that time step or at a later time step."
            )
    return _precise_tree(roles)


def render_constraint(phi: Formula, level: str = "informal") -> str:
    """Word a benchmark constraint; ``precise+ltl`` appends the ascii formula."""
    if level not in LEVELS:
        raise KnobError("level", level, f"expected one of {', '.join(LEVELS)}")
    pattern, roles = identify_pattern(phi)
    if level == "informal":
        return _informal(pattern, roles)
    text = _precise_text(pattern, roles)
    if level == "precise+ltl":
        text += f"\nLTL: {render(phi)}"
    return text
