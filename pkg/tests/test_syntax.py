"""
Tests for PCF_H abstract syntax
===============================

Free variables, fresh names, capture-avoiding substitution and
alpha-equivalence.
"""

import pytest
from hypothesis import given, settings

from conftest import parse
from strategies import closed_terms, open_terms
from syntax import (
    Abs,
    App,
    Fix,
    IfZ,
    Succ,
    Var,
    VAbs,
    VNat,
    Zero,
    all_names,
    alpha_eq,
    fresh_name,
    free_vars,
    is_value,
    nat_value,
    numeral,
    subst,
    term_size,
    value_view,
)


class TestFreeVars:
    """Test free variable computation."""

    def test_variable_is_free(self):
        assert free_vars(Var("x")) == {"x"}

    def test_abstraction_binds(self):
        assert free_vars(parse("\\x. x y")) == {"y"}

    def test_fix_binds(self):
        assert free_vars(parse("fix f. f x")) == {"x"}

    def test_ifz_binder_scopes_over_else_only(self):
        t = parse("ifz(n; n; n. n)")
        assert free_vars(t) == {"n"}
        assert free_vars(parse("ifz(0; 0; m. m)")) == frozenset()

    def test_all_names_includes_binders(self):
        assert all_names(parse("\\x. ifz(y; 0; m. z)")) == {"x", "y", "m", "z"}


class TestFreshName:
    """Test the fresh name scheme."""

    def test_appends_smallest_index(self):
        assert fresh_name("y", {"y"}) == "y1"

    def test_skips_taken_indices(self):
        assert fresh_name("y", {"y", "y1", "y2"}) == "y3"

    def test_strips_trailing_digits_and_primes(self):
        assert fresh_name("y1", {"y1"}) == "y2"
        assert fresh_name("x'", {"x'"}) == "x1"

    def test_all_digits_fall_back(self):
        assert fresh_name("1", set()) == "v1"


class TestSubst:
    """Test capture-avoiding substitution."""

    def test_replaces_free_occurrence(self):
        assert subst(parse("x x"), "x", Zero()) == parse("0 0")

    def test_stops_at_shadowing_binder(self):
        t = parse("\\x. x")
        assert subst(t, "x", Zero()) is t

    def test_avoids_capture(self):
        result = subst(parse("\\y. x"), "x", Var("y"))
        assert isinstance(result, Abs)
        assert result.binder == "y1"
        assert result.body == Var("y")
        assert alpha_eq(result, parse("\\z. y"))

    def test_ifz_binder_shadows_else(self):
        t = parse("ifz(x; x; x. x)")
        assert subst(t, "x", Zero()) == IfZ(Zero(), Zero(), "x", Var("x"))

    def test_ifz_binder_renamed_on_capture(self):
        result = subst(parse("ifz(0; 0; m. x m)"), "x", Var("m"))
        assert alpha_eq(result, parse("ifz(0; 0; k. m k)"))

    def test_fix_unfolding_substitutes_non_values(self):
        fix = parse("fix f. \\n. f n")
        result = subst(fix.body, "f", fix)
        assert result == Abs("n", App(fix, Var("n")))

    @given(open_terms())
    @settings(max_examples=300)
    def test_absent_variable_is_identity(self, t):
        assert subst(t, "w", Zero()) == t

    @given(open_terms())
    @settings(max_examples=300)
    def test_substituting_closed_term_removes_variable(self, t):
        assert "x" not in free_vars(subst(t, "x", parse("\\z. z")))


class TestAlphaEquivalence:
    """Test comparison up to bound names."""

    def test_renamed_binders_are_equal(self):
        assert alpha_eq(parse("\\x. \\y. x y"), parse("\\a. \\b. a b"))

    def test_different_structure_is_not_equal(self):
        assert not alpha_eq(parse("\\x. \\y. x y"), parse("\\x. \\y. y x"))

    def test_free_names_matter(self):
        assert not alpha_eq(Var("x"), Var("y"))

    def test_ifz_binders_compared_by_position(self):
        assert alpha_eq(parse("ifz(0; 0; m. m)"), parse("ifz(0; 0; k. k)"))

    @given(closed_terms())
    @settings(max_examples=300)
    def test_reflexive(self, t):
        assert alpha_eq(t, t)


class TestValues:
    """Test numerals and value views."""

    def test_numeral_round_trip(self):
        assert nat_value(numeral(3)) == 3
        assert numeral(2) == Succ(Succ(Zero()))

    def test_negative_numeral_rejected(self):
        with pytest.raises(ValueError):
            numeral(-1)

    def test_value_view(self):
        assert value_view(numeral(2)) == VNat(2)
        assert value_view(parse("\\x. x")) == VAbs("x", Var("x"))
        assert value_view(Succ(Var("x"))) is None
        assert value_view(Fix("f", Var("f"))) is None

    def test_is_value(self):
        assert is_value(Zero())
        assert not is_value(parse("(\\x. x) 0"))

    def test_term_size(self):
        assert term_size(parse("\\x. x 0")) == 4
