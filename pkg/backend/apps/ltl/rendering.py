"""
Text renderings of formulas.

``ascii`` is the canonical on-disk and CLI format; ``symbolic`` uses the
logic symbols. Both parse back to the same tree. ``english`` is a fixed
template rendering used in prompts (see the template table in the README).
"""
from typing import Literal

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
    Until,
)

Style = Literal["ascii", "symbolic", "english"]
STYLES: tuple[str, ...] = ("ascii", "symbolic", "english")

SYMBOLS = {
    "ascii": {
        TrueLit: "true",
        FalseLit: "false",
        Not: "!",
        And: " & ",
        Or: " | ",
        Implies: " -> ",
        Until: " U ",
        Next: "X",
        Eventually: "F",
        Always: "G",
    },
    "symbolic": {
        TrueLit: "⊤",
        FalseLit: "⊥",
        Not: "¬",
        And: " ∧ ",
        Or: " ∨ ",
        Implies: " → ",
        Until: " 𝒰 ",
        Next: "○",
        Eventually: "◇",
        Always: "□",
    },
}

# Higher binds tighter
PRECEDENCE = {
    Implies: 1,
    Or: 2,
    And: 3,
    Until: 4,
    Not: 5,
    Next: 5,
    Eventually: 5,
    Always: 5,
}
ATOM_PRECEDENCE = 6


def render(phi: Formula, style: Style = "ascii") -> str:
    if style == "english":
        return _sentence(phi, top=True)
    if style not in SYMBOLS:
        raise ValueError(f"Unknown rendering style: {style!r}")
    return _render_text(phi, SYMBOLS[style], style == "ascii")


def _precedence(phi: Formula) -> int:
    return PRECEDENCE.get(type(phi), ATOM_PRECEDENCE)


def _render_text(phi: Formula, symbols: dict, spaced_unary: bool) -> str:
    kind = type(phi)

    if isinstance(phi, Prop):
        return phi.name
    if isinstance(phi, (TrueLit, FalseLit)):
        return symbols[kind]

    if phi.arity == 1:
        child = _render_text(phi.child, symbols, spaced_unary)
        if _precedence(phi.child) < PRECEDENCE[kind]:
            return f"{symbols[kind]}({child})"
        # "G p" rather than "Gp", which would read as one name
        if spaced_unary and kind is not Not:
            return f"{symbols[kind]} {child}"
        return f"{symbols[kind]}{child}"

    # all binary operators associate to the right
    left = _render_text(phi.left, symbols, spaced_unary)
    right = _render_text(phi.right, symbols, spaced_unary)
    if _precedence(phi.left) <= PRECEDENCE[kind]:
        left = f"({left})"
    if _precedence(phi.right) < PRECEDENCE[kind]:
        right = f"({right})"
    return f"{left}{symbols[kind]}{right}"


# ENGLISH TEMPLATES


def _is_temporal(phi: Formula) -> bool:
    if isinstance(phi, (Next, Eventually, Always, Until)):
        return True
    return any(_is_temporal(child) for child in phi.children() if isinstance(child, Formula))


def _condition(phi: Formula) -> str:
    """A state condition as a noun phrase."""
    match phi:
        case Prop(name):
            return name
        case TrueLit():
            return "true"
        case FalseLit():
            return "false"
        case Not(child):
            return f"not {_grouped(child)}"
        case And(left, right):
            return f"{_grouped(left)} and {_grouped(right)}"
        case Or(left, right):
            return f"{_grouped(left)} or {_grouped(right)}"
        case Implies(left, right):
            return f"if {_grouped(left)} then {_grouped(right)}"
        case Next(child):
            return f"next {_grouped(child)}"
        case Eventually(child):
            return f"eventually {_grouped(child)}"
        case Always(child):
            return f"always {_grouped(child)}"
        case Until(left, right):
            return f"{_grouped(left)} until {_grouped(right)}"
    raise TypeError(f"Not a formula: {phi!r}")


def _grouped(phi: Formula) -> str:
    if isinstance(phi, (Prop, TrueLit, FalseLit)):
        return _condition(phi)
    return f"({_condition(phi)})"


def _sentence(phi: Formula, top: bool = False) -> str:
    match phi:
        case Eventually(child):
            return f"eventually, {_sentence(child)}"
        case Always(child):
            return f"at every step, {_sentence(child)}"
        case Next(child):
            return f"at the next step, {_sentence(child)}"
        case Until(left, right):
            return f"{_condition(left)} must hold until {_condition(right)} holds"
        case Implies(left, right):
            return f"if {_condition(left)} holds, then {_sentence(right, top)}"
        case And(left, right) if _is_temporal(phi):
            return f"{_sentence(left, top)}; and {_sentence(right, top)}"
        case Or(left, right) if _is_temporal(phi):
            return f"either {_sentence(left, top)}; or {_sentence(right, top)}"
    suffix = " now" if top else ""
    return f"{_condition(phi)} must hold{suffix}"
