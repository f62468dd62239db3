"""
Concrete LTL grammar.

Precedence from loosest to tightest: ``->``, ``|``, ``&``, ``U``, then the
unary operators ``!``, ``G``, ``F``, ``X``.
Every ASCII operator also has its symbolic spelling so that both renderings
parse back to the same tree. All binary operators associate to the right, which
matches the right-nested conjunctions and disjunctions built by ``simplify``.
"""
import logging

from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken

from .exceptions import FormulaSyntaxError
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
    Until,
)

logger = logging.getLogger(__name__)

GRAMMAR = r"""
?start: implication

?implication: disjunction
    | disjunction ("->" | "→") implication     -> implies

?disjunction: conjunction
    | conjunction ("|" | "∨") disjunction      -> or_

?conjunction: until
    | until ("&" | "∧") conjunction            -> and_

?until: unary
    | unary ("U" | "𝒰") until                  -> until

?unary: atom
    | ("!" | "¬") unary                        -> not_
    | ("G" | "□") unary                        -> always
    | ("F" | "◇") unary                        -> eventually
    | ("X" | "○") unary                        -> next

?atom: ("true" | "⊤")                          -> true
    | ("false" | "⊥")                          -> false
    | NAME                                     -> prop
    | "(" implication ")"

NAME: /[A-Za-z0-9_]+/

%import common.WS
%ignore WS
"""


class BuildFormula(Transformer):
    def implies(self, children):
        return Implies(*children)

    def or_(self, children):
        return Or(*children)

    def and_(self, children):
        return And(*children)

    def until(self, children):
        return Until(*children)

    def not_(self, children):
        return Not(children[0])

    def always(self, children):
        return Always(children[0])

    def eventually(self, children):
        return Eventually(children[0])

    def next(self, children):
        return Next(children[0])

    def true(self, children):
        return TRUE

    def false(self, children):
        return FALSE

    def prop(self, children):
        token: Token = children[0]
        return Prop(str(token))


_LARK = Lark(GRAMMAR, parser="lalr", transformer=BuildFormula())


def parse(text: str) -> Formula:
    """Parse a formula string into its syntax tree."""
    try:
        return _LARK.parse(text)
    except UnexpectedInput as exc:
        raise _syntax_error(text, exc) from None


def _end_position(text: str) -> tuple[int, int]:
    lines = text.splitlines() or [""]
    if text.endswith("\n"):
        lines.append("")
    return len(lines), len(lines[-1]) + 1


def _describe_terminal(name: str) -> str:
    try:
        return _LARK.get_terminal(name).pattern.value
    except KeyError:
        return name


def _syntax_error(text: str, exc: UnexpectedInput) -> FormulaSyntaxError:
    unbalanced = text.count("(") != text.count(")")

    if isinstance(exc, UnexpectedCharacters):
        char = text[exc.pos_in_stream] if exc.pos_in_stream < len(text) else ""
        expected = frozenset(_describe_terminal(name) for name in exc.allowed or ())
        if char and not (char.isalnum() or char == "_" or char in "()"):
            # also covers known characters in unknown combinations, e.g. "<->"
            reason = f"unknown operator {char!r}"
        else:
            reason = "syntax error"
        return FormulaSyntaxError(reason, text, exc.line, exc.column, expected)

    if isinstance(exc, UnexpectedToken):
        expected = frozenset(_describe_terminal(name) for name in exc.expected)
        token = exc.token
        if token.type == "$END":
            line, column = _end_position(text)
            reason = "unbalanced parentheses" if unbalanced else "unexpected end of input"
        else:
            line, column = token.line, token.column
            if token.type == "RPAR" or unbalanced:
                reason = "unbalanced parentheses"
            else:
                reason = f"syntax error: unexpected {str(token)!r}"
        return FormulaSyntaxError(reason, text, line, column, expected)

    if isinstance(exc, UnexpectedEOF):
        line, column = _end_position(text)
        expected = frozenset(_describe_terminal(name) for name in exc.expected)
        reason = "unbalanced parentheses" if unbalanced else "unexpected end of input"
        return FormulaSyntaxError(reason, text, line, column, expected)

    logger.warning(f"Unclassified parser error: {exc}")
    return FormulaSyntaxError("syntax error", text, getattr(exc, "line", 1), getattr(exc, "column", 1))
