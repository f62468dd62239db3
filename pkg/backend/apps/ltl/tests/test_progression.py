import pytest

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
    size,
)
from backend.apps.ltl.parser import parse
from backend.apps.ltl.progression import advance, progress, simplify, verdict_of

p, q = Prop("p"), Prop("q")


class TestProgress:
    def test_pickup_then_putdown(self):
        phi = parse("F(pickup & X F putdown)")
        assert simplify(progress(phi, {"pickup"})) == Eventually(Prop("putdown"))

    def test_always_holds(self):
        assert simplify(progress(Always(p), {"p"})) == Always(p)

    def test_proposition_absent(self):
        assert progress(p, set()) == FALSE

    def test_proposition_present(self):
        assert progress(p, {"p"}) == TRUE

    def test_raw_result_is_unsimplified(self):
        assert progress(Always(p), {"p"}) == And(TRUE, Always(p))

    def test_next_drops_operator(self):
        assert progress(Next(p), set()) == p

    def test_until_rule(self):
        phi = Until(p, q)
        assert progress(phi, {"p"}) == Or(FALSE, And(TRUE, phi))

    def test_eventually_rule(self):
        assert progress(Eventually(p), set()) == Or(FALSE, Eventually(p))

    def test_implies_as_disjunction(self):
        assert progress(Implies(p, q), {"p"}) == Or(Not(TRUE), FALSE)

    def test_literals_are_fixed(self):
        assert progress(TRUE, {"p"}) == TRUE
        assert progress(FALSE, {"p"}) == FALSE

    def test_accepts_any_iterable(self):
        assert progress(p, ["p"]) == TRUE


class TestSimplify:
    @pytest.mark.parametrize(
        ("phi", "expected"),
        [
            (And(TRUE, Eventually(p)), Eventually(p)),
            (Or(FALSE, FALSE), FALSE),
            (Or(Eventually(p), Eventually(p)), Eventually(p)),
            (Not(TRUE), FALSE),
            (Not(FALSE), TRUE),
            (Not(Not(p)), p),
            (And(FALSE, p), FALSE),
            (Or(TRUE, p), TRUE),
            (And(p, p), p),
            (Implies(TRUE, p), p),
            (Implies(FALSE, p), TRUE),
        ],
    )
    def test_rules(self, phi, expected):
        assert simplify(phi) == expected

    def test_commutative_duplicate_absorption(self):
        phi = And(p, And(q, p))
        assert simplify(phi) == And(p, q)

    def test_nested_flattening(self):
        phi = Or(Or(p, FALSE), Or(q, p))
        assert simplify(phi) == Or(p, q)

    def test_eventuality_absorbs_stronger_disjunct(self):
        phi = Or(Eventually(q), Eventually(And(p, Next(Eventually(q)))))
        assert simplify(phi) == Eventually(q)

    def test_absorption_keeps_one_of_equivalent_disjuncts(self):
        assert simplify(Or(Eventually(q), Eventually(Eventually(q)))) == Eventually(Eventually(q))

    @pytest.mark.parametrize("stronger", [q, Until(p, q), Always(q), Next(q), And(p, Eventually(q))])
    def test_absorption_into_eventually(self, stronger):
        assert simplify(Or(stronger, Eventually(q))) == Eventually(q)

    def test_unrelated_disjuncts_kept(self):
        phi = Or(Eventually(q), Eventually(And(p, Next(Eventually(p)))))
        assert simplify(phi) == phi

    def test_disjunction_must_guarantee_on_both_sides(self):
        phi = Or(Eventually(q), Eventually(Or(q, p)))
        assert simplify(phi) == phi

    def test_no_semantic_tautology_check(self):
        phi = Or(Eventually(p), Eventually(Not(p)))
        assert simplify(phi) == phi
        assert verdict_of(simplify(phi)) is Verdict.INCONCLUSIVE

    def test_unchanged_subtree_is_same_object(self):
        phi = Always(Implies(p, Eventually(q)))
        assert simplify(phi) is phi

    def test_simplifies_under_temporal_operators(self):
        assert simplify(Always(And(TRUE, p))) == Always(p)

    def test_idempotent_and_shrinking(self):
        phi = And(Or(FALSE, Not(Not(p))), And(TRUE, Or(p, FALSE)))
        once = simplify(phi)
        assert simplify(once) == once
        assert size(once) <= size(phi)


class TestVerdictOf:
    def test_false_is_violated(self):
        assert verdict_of(FALSE) is Verdict.VIOLATED

    def test_true_is_satisfied(self):
        assert verdict_of(TRUE) is Verdict.SATISFIED

    def test_residual_is_inconclusive(self):
        assert verdict_of(Eventually(p)) is Verdict.INCONCLUSIVE

    def test_always_violated_on_first_miss(self):
        assert verdict_of(advance(Always(p), set())) is Verdict.VIOLATED

    def test_verdict_labels(self):
        assert Verdict.SATISFIED.label == "Satisfied"
        assert Verdict.INCONCLUSIVE.is_terminal is False
