import pytest

from backend.apps.ltl.formula import Always, Prop
from backend.apps.ltl.parser import parse
from backend.apps.ltl.rendering import render
from backend.apps.synthbench.exceptions import KnobError, UnknownPatternError
from backend.apps.synthbench.patterns import (
    PATTERN_ROLES,
    as_tree,
    build_tree,
    identify_pattern,
    pattern_formula,
    render_constraint,
    sequence_formula,
    tree_formula,
    tree_size,
)

TREE_NAMES = ["animal_toucan", "animal_crane", "animal_pelican", "animal_deer"]


def complex_names():
    return [f"number_{value}" for value in range(1, tree_size(4))] + ["animal_deer"]


class TestTrees:
    def test_sizes(self):
        assert tree_size(0) == 2
        assert tree_size(1) == 4
        assert tree_size(4) == 32

    def test_sequence_is_simple_formula(self):
        assert sequence_formula("a", "b") == parse("F(a & X F b)")

    def test_complex_tree_has_sixteen_paths_to_one_leaf(self):
        tree = build_tree(complex_names(), 4)
        paths = tree.paths()
        assert len(paths) == 16
        assert {path[-1] for path in paths} == {"animal_deer"}
        assert all(len(path) == 6 for path in paths)
        assert as_tree(tree_formula(tree)) == tree

    def test_wrong_name_count(self):
        with pytest.raises(KnobError):
            build_tree(TREE_NAMES, 4)


class TestIdentifyPattern:
    @pytest.mark.parametrize("pattern", sorted(PATTERN_ROLES))
    def test_property_patterns(self, pattern):
        bindings = dict(zip(PATTERN_ROLES[pattern], ["color_red", "shape_star", "animal_fox"], strict=False))
        name, roles = identify_pattern(pattern_formula(pattern, bindings))
        assert name == pattern
        assert roles == bindings

    def test_patterns_survive_text_round_trip(self):
        phi = pattern_formula("absence_between", {"P": "color_green", "Q": "animal_fox", "R": "shape_star"})
        assert identify_pattern(parse(render(phi)))[0] == "absence_between"

    def test_trees(self):
        assert identify_pattern(sequence_formula("a", "b"))[0] == "sequence"
        assert identify_pattern(tree_formula(build_tree(TREE_NAMES, 1)))[0] == "tree_b2_d1"
        assert identify_pattern(tree_formula(build_tree(complex_names(), 4)))[0] == "tree_b2_d4"

    def test_unknown(self):
        with pytest.raises(UnknownPatternError):
            identify_pattern(parse("a U b"))


class TestRenderConstraint:
    def test_universality_informal(self):
        assert render_constraint(Always(Prop("color_red"))) == "The color is always red."

    def test_universality_precise(self):
        text = render_constraint(Always(Prop("color_red")), "precise")
        assert text == "At every time step in the trace, the color must be red."

    def test_absence(self):
        phi = pattern_formula("absence", {"P": "animal_owl"})
        assert render_constraint(phi) == "An owl never appears."
        assert render_constraint(phi, "precise") == 'At no time step in the trace does the animal "owl" appear.'

    def test_response_precise(self):
        phi = pattern_formula("response", {"P": "shape_triangle", "S": "color_blue"})
        assert render_constraint(phi) == "Whenever a triangle appears, a blue item should eventually appear too."
        assert render_constraint(phi, "precise") == (
            "It is always the case that for every occurrence of a triangle shape, the color blue must occur "
            "at the same time step or at a later time step."
        )

    def test_constrained_response_informal(self):
        phi = pattern_formula("constrained_response", {"P": "shape_square", "Q": "animal_fox", "R": "shape_circle"})
        assert render_constraint(phi) == "Whenever a square appears, a fox should not appear until a circle appears."

    def test_tree_informal(self):
        phi = tree_formula(build_tree(TREE_NAMES, 1))
        assert render_constraint(phi) == (
            "At some point a toucan should appear, followed by either a crane or a pelican, and then a deer."
        )

    def test_deep_tree_informal_ends_with_leaf(self):
        text = render_constraint(tree_formula(build_tree(complex_names(), 4)))
        assert text.endswith("Everything ends with a deer.")
        assert text.count("If ") == 14

    def test_entity_sequence(self):
        phi = sequence_formula("entity3_animal_salmon", "entity1_color_olive")
        assert render_constraint(phi) == (
            "Eventually Entity 3's animal is a salmon, and then eventually Entity 1's color is olive."
        )

    @pytest.mark.parametrize(
        "phi",
        [
            Always(Prop("color_red")),
            pattern_formula("absence_between", {"P": "color_green", "Q": "animal_fox", "R": "shape_star"}),
            tree_formula(build_tree(TREE_NAMES, 1)),
        ],
    )
    def test_precise_with_formula(self, phi):
        text = render_constraint(phi, "precise+ltl")
        precise, formula = text.split("\nLTL: ")
        assert precise == render_constraint(phi, "precise")
        assert parse(formula) == phi

    def test_unknown_level(self):
        with pytest.raises(KnobError):
            render_constraint(Always(Prop("color_red")), "formal")
