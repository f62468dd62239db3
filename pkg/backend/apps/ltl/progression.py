"""
Formula progression, syntactic simplification and verdict extraction.
"""
from collections.abc import Iterable
from functools import lru_cache

from .formula import (
    FALSE,
    TRUE,
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
    Verdict,
    conjoin,
    disjoin,
)

CACHE_SIZE = 1 << 16


# PROGRESSION


def progress(phi: Formula, sigma: Iterable[str]) -> Formula:
    """
    Rewrite ``phi`` against the truth assignment of the current step.

    The result is what the rest of the word must satisfy. It is returned
    unsimplified; compose with :func:`simplify`.
    """
    return _progress(phi, frozenset(sigma))


@lru_cache(maxsize=CACHE_SIZE)
def _progress(phi: Formula, sigma: frozenset[str]) -> Formula:
    match phi:
        case TrueLit() | FalseLit():
            return phi
        case Prop(name):
            return TRUE if name in sigma else FALSE
        case Not(child):
            return Not(_progress(child, sigma))
        case And(left, right):
            return And(_progress(left, sigma), _progress(right, sigma))
        case Or(left, right):
            return Or(_progress(left, sigma), _progress(right, sigma))
        case Implies(left, right):
            return Or(Not(_progress(left, sigma)), _progress(right, sigma))
        case Next(child):
            return child
        case Until(left, right):
            return Or(_progress(right, sigma), And(_progress(left, sigma), phi))
        case Always(child):
            return And(_progress(child, sigma), phi)
        case Eventually(child):
            return Or(_progress(child, sigma), phi)
    raise TypeError(f"Not a formula: {phi!r}")


# SIMPLIFICATION


@lru_cache(maxsize=CACHE_SIZE)
def simplify(phi: Formula) -> Formula:
    """
    Apply the literal, double-negation, duplicate and eventuality-absorption
    rules to a fixed point.

    Subtrees that need no rewriting are returned as the same objects.
    """
    current = phi
    while True:
        rewritten = _rewrite(current)
        if rewritten == current:
            return current
        current = rewritten


def _operands(kind: type, phi: Formula) -> list[Formula]:
    if isinstance(phi, kind):
        return _operands(kind, phi.left) + _operands(kind, phi.right)
    return [phi]


def _dedupe(parts: list[Formula]) -> list[Formula]:
    seen: set[Formula] = set()
    unique = []
    for part in parts:
        if part not in seen:
            seen.add(part)
            unique.append(part)
    return unique


def _guarantees(phi: Formula, target: Formula) -> bool:
    """Syntactic check that ``phi`` holding now forces ``target`` now or later."""
    match phi:
        case _ if phi == target:
            return True
        case And(left, right):
            return _guarantees(left, target) or _guarantees(right, target)
        case Or(left, right):
            return _guarantees(left, target) and _guarantees(right, target)
        case Next(child) | Eventually(child) | Always(child):
            return _guarantees(child, target)
        case Until(_, right):
            return _guarantees(right, target)
    return False


def _absorb(parts: list[Formula]) -> list[Formula]:
    """Drop disjuncts that entail a sibling ``F x``; ``F x | F(a & X F x)`` is ``F x``."""
    kept = list(parts)
    for part in parts:
        others = [other for other in kept if other is not part]
        if any(isinstance(other, Eventually) and _guarantees(part, other.child) for other in others):
            kept = others
    return kept


@lru_cache(maxsize=CACHE_SIZE)
def _rewrite(phi: Formula) -> Formula:
    match phi:
        case TrueLit() | FalseLit() | Prop():
            return phi

        case Not(child):
            inner = _rewrite(child)
            if isinstance(inner, TrueLit):
                return FALSE
            if isinstance(inner, FalseLit):
                return TRUE
            if isinstance(inner, Not):
                return inner.child
            return phi if inner is child else Not(inner)

        case And(left, right):
            parts = _operands(And, _rewrite(left)) + _operands(And, _rewrite(right))
            if any(isinstance(part, FalseLit) for part in parts):
                return FALSE
            parts = _dedupe([part for part in parts if not isinstance(part, TrueLit)])
            result = conjoin(*parts)
            return phi if result == phi else result

        case Or(left, right):
            parts = _operands(Or, _rewrite(left)) + _operands(Or, _rewrite(right))
            if any(isinstance(part, TrueLit) for part in parts):
                return TRUE
            parts = _absorb(_dedupe([part for part in parts if not isinstance(part, FalseLit)]))
            result = disjoin(*parts)
            return phi if result == phi else result

        case Implies(left, right):
            antecedent = _rewrite(left)
            consequent = _rewrite(right)
            if isinstance(antecedent, TrueLit):
                return consequent
            if isinstance(antecedent, FalseLit):
                return TRUE
            if antecedent is left and consequent is right:
                return phi
            return Implies(antecedent, consequent)

        case Next(child) | Eventually(child) | Always(child):
            inner = _rewrite(child)
            return phi if inner is child else type(phi)(inner)

        case Until(left, right):
            hold = _rewrite(left)
            release = _rewrite(right)
            if hold is left and release is right:
                return phi
            return Until(hold, release)

    raise TypeError(f"Not a formula: {phi!r}")


# VERDICTS


def verdict_of(phi: Formula) -> Verdict:
    """Map a simplified residual to its three-valued verdict."""
    if isinstance(phi, FalseLit):
        return Verdict.VIOLATED
    if isinstance(phi, TrueLit):
        return Verdict.SATISFIED
    return Verdict.INCONCLUSIVE


def advance(phi: Formula, sigma: Iterable[str]) -> Formula:
    """One monitor step: ``simplify(progress(phi, sigma))``."""
    return simplify(progress(phi, sigma))
