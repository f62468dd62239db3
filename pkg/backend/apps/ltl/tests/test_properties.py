"""
Property suites tying progression to the lasso-word semantics.
"""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from backend.apps.ltl.formula import (
    FALSE,
    TRUE,
    Always,
    And,
    Eventually,
    Implies,
    Next,
    Not,
    Or,
    Prop,
    Until,
    Verdict,
    propositions,
    size,
)
from backend.apps.ltl.generators import all_lassos, all_words, random_formula, random_lasso
from backend.apps.ltl.parser import parse
from backend.apps.ltl.progression import advance, progress, simplify, verdict_of
from backend.apps.ltl.rendering import render
from backend.apps.ltl.semantics import LassoWord

PROPS = ("a", "b", "c", "d")

formulas = st.recursive(
    st.sampled_from([Prop(name) for name in PROPS] + [TRUE, FALSE]),
    lambda children: st.one_of(
        st.builds(Not, children),
        st.builds(Next, children),
        st.builds(Eventually, children),
        st.builds(Always, children),
        st.builds(And, children, children),
        st.builds(Or, children, children),
        st.builds(Implies, children, children),
        st.builds(Until, children, children),
    ),
    max_leaves=12,
)

assignments = st.frozensets(st.sampled_from(PROPS))
lassos = st.builds(
    LassoWord,
    st.lists(assignments, max_size=6).map(tuple),
    st.lists(assignments, min_size=1, max_size=3).map(tuple),
)


class TestSyntaxProperties:
    @given(formulas)
    @settings(deadline=None)
    def test_ascii_round_trip(self, phi):
        assert parse(render(phi, "ascii")) == phi

    @given(formulas)
    @settings(deadline=None)
    def test_symbolic_round_trip(self, phi):
        assert parse(render(phi, "symbolic")) == phi

    @given(formulas)
    @settings(deadline=None)
    def test_simplify_idempotent_and_shrinking(self, phi):
        once = simplify(phi)
        assert simplify(once) == once
        assert size(once) <= size(phi)

    @given(formulas, lassos)
    @settings(max_examples=300, deadline=None)
    def test_simplify_preserves_semantics(self, phi, word):
        assert word.satisfies(phi) == word.satisfies(simplify(phi))


class TestProgressionTheorem:
    def test_random_corpus(self):
        rng = np.random.default_rng(20240601)
        counterexamples = []
        for _ in range(10_000):
            phi = random_formula(rng, PROPS, max_depth=5)
            word = random_lasso(rng, PROPS, max_prefix=6, max_loop=3)
            expected = word.satisfies(phi)
            rest = word.shifted()
            if rest.satisfies(progress(phi, word.first)) != expected:
                counterexamples.append((render(phi), word))
            elif rest.satisfies(advance(phi, word.first)) != expected:
                counterexamples.append((render(phi), word))
        assert counterexamples == []

    @given(formulas, lassos)
    @settings(max_examples=300, deadline=None)
    def test_hypothesis_corpus(self, phi, word):
        assert word.satisfies(phi) == word.shifted().satisfies(progress(phi, word.first))


# (formula, whether a finite prefix can reach a terminal verdict)
TEMPLATES = [
    ("G p", True),
    ("F p", True),
    ("p U q", True),
    ("F(p & X F q)", True),
    ("G(p -> F q)", False),
]


def _alphabet(phi):
    names = sorted(propositions(phi))
    # a distractor keeps single-proposition formulas honest
    return names + ["r"] if len(names) == 1 else names


class TestVerdictSoundness:
    @pytest.mark.parametrize(("text", "decidable"), TEMPLATES)
    def test_terminal_verdicts_hold_on_every_extension(self, text, decidable):
        phi = parse(text)
        alphabet = _alphabet(phi)
        loops = all_lassos(alphabet, max_loop=2)
        checked = 0
        for length in range(1, 5):
            for prefix in all_words(alphabet, length):
                residual = phi
                for sigma in prefix:
                    residual = advance(residual, sigma)
                verdict = verdict_of(residual)
                if not verdict.is_terminal:
                    continue
                expected = verdict is Verdict.SATISFIED
                for loop in loops:
                    assert LassoWord(prefix, loop.loop).satisfies(phi) == expected
                    checked += 1
        assert (checked > 0) == decidable
