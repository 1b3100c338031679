"""
Tests for PCF_H evaluation
==========================

One-step reduction, deterministic evaluation, normal-form classification,
rule counters and the diamond property.
"""

import pytest
from hypothesis import given, settings

from conftest import parse
from evaluation import (
    EMPTY_COUNTER,
    MultiCounter,
    Nature,
    OpenTermError,
    Position,
    RuleName,
    Step,
    Strategy,
    classify_nf,
    diamond_check,
    evaluate,
    reduce_at,
    reduction_profiles,
    render_trace,
    replace_at,
    root_step,
    step_all,
    step_det,
    subterm_at,
    trace_lines,
)
from strategies import closed_terms
from syntax import Abs, Succ, Zero, alpha_eq, is_value, numeral


B, I0, IS, F = RuleName.B, RuleName.I0, RuleName.IS, RuleName.F


class TestMultiCounter:
    """Test rule multisets."""

    def test_of_and_getitem(self):
        counter = MultiCounter.of(B, B, F)
        assert counter[B] == 2
        assert counter[F] == 1
        assert counter[I0] == 0
        assert len(counter) == 3

    def test_sum(self):
        assert MultiCounter.of(B) + MultiCounter.of(IS) == MultiCounter.of(IS, B)

    def test_remove(self):
        assert MultiCounter.of(B, F).remove(F) == MultiCounter.of(B)
        with pytest.raises(ValueError):
            EMPTY_COUNTER.remove(B)

    def test_str_uses_fixed_order(self):
        assert str(MultiCounter.of(F, B, I0, IS, F)) == "{B:1, I0:1, IS:1, F:2}"

    def test_json(self):
        counter = MultiCounter.of(B, I0)
        assert counter.to_json() == {"B": 1, "I0": 1, "IS": 0, "F": 0}
        assert MultiCounter.from_json({"B": 1, "I0": 1}) == counter

    def test_json_rejects_unknown_rule(self):
        with pytest.raises(ValueError):
            MultiCounter.from_json({"X": 1})

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError):
            MultiCounter((0, -1, 0, 0))


class TestRootStep:
    """Test the four root rules."""

    def test_beta_needs_value_argument(self):
        assert root_step(parse("(\\x. S x) 0")) == (B, Succ(Zero()))
        assert root_step(parse("(\\x. x) ((\\y. y) 0)")) is None

    def test_ifz_zero(self):
        assert root_step(parse("ifz(0; 0; m. S m)")) == (I0, Zero())

    def test_ifz_successor(self):
        assert root_step(parse("ifz(S S 0; 0; m. S m)")) == (IS, numeral(2))

    def test_ifz_successor_needs_numeral(self):
        assert root_step(parse("ifz(S \\x. x; 0; m. m)")) is None

    def test_fix_unfolds(self):
        t = parse("fix f. \\x. f")
        rule, reduct = root_step(t)
        assert rule is F
        assert reduct == Abs("x", t)

    def test_abstraction_is_not_a_redex(self):
        assert root_step(parse("\\x. (\\y. y) x")) is None


class TestPositions:
    """Test navigation along congruence paths."""

    def test_subterm_and_replace(self):
        t = parse("S ((\\x. x) 0)")
        assert subterm_at(t, (Position.INNER, Position.ARG)) == Zero()
        assert replace_at(t, (Position.INNER,), Zero()) == numeral(1)

    def test_missing_position(self):
        with pytest.raises(ValueError):
            subterm_at(Zero(), (Position.FUN,))

    def test_reduce_at(self):
        t = parse("S ((\\x. x) 0)")
        assert reduce_at(t, (Position.INNER,)) == Step(B, numeral(1), (Position.INNER,))
        assert reduce_at(t, ()) is None


class TestStepAll:
    """Test the full one-step relation."""

    def test_diamond_term_has_two_reducts(self, diamond_term):
        steps = step_all(diamond_term)
        assert [(s.rule, s.path) for s in steps] == [(B, (Position.FUN,)), (I0, (Position.ARG,))]

    def test_no_reduction_under_abstraction(self):
        assert step_all(parse("\\x. (\\y. y) 0")) == []

    def test_no_reduction_in_branches(self):
        assert step_all(parse("ifz(\\z. z; (\\y. y) 0; m. m)")) == []

    def test_guard_reduces(self):
        steps = step_all(parse("ifz((\\y. y) 0; 0; m. m)"))
        assert [(s.rule, s.path) for s in steps] == [(B, (Position.GUARD,))]


class TestStepDet:
    """Test the deterministic strategy."""

    def test_left_first(self, diamond_term):
        assert step_det(diamond_term).rule is B

    def test_right_first(self, diamond_term):
        assert step_det(diamond_term, Strategy.RIGHT).rule is I0

    def test_root_before_inner(self):
        step = step_det(parse("(\\x. x) (\\y. y)"))
        assert step.path == ()

    def test_normal_form(self):
        assert step_det(parse("\\x. x")) is None


class TestEvaluate:
    """Test evaluation with a fuel bound."""

    def test_doubling(self, doubling):
        trace = evaluate(doubling, 100)
        assert trace.rules == (F, B, IS, F, B, I0)
        assert trace.final == numeral(2)
        assert trace.nature is Nature.NAT
        assert trace.counter == MultiCounter.of(B, B, I0, IS, F, F)
        assert len(trace) == 6

    def test_two_step(self, two_step):
        trace = evaluate(two_step, 100)
        assert trace.rules == (IS, B)
        assert trace.final == Zero()

    def test_zero_fuel_takes_no_step(self):
        trace = evaluate(parse("\\x. x"), 0)
        assert trace.nature is Nature.ABS
        assert len(trace) == 0
        assert evaluate(parse("(\\x. x) 0"), 0).exhausted

    def test_fuel_exhausted(self):
        trace = evaluate(parse("fix x. x"), 25)
        assert trace.exhausted
        assert len(trace) == 25

    def test_stuck(self, stuck_term):
        trace = evaluate(stuck_term, 10)
        assert trace.nature is Nature.STUCK
        assert len(trace) == 0

    def test_open_term_rejected(self):
        with pytest.raises(OpenTermError):
            evaluate(parse("x"), 10)

    def test_terms_lists_every_stage(self, two_step):
        trace = evaluate(two_step, 10)
        assert trace.terms[0] == two_step
        assert trace.terms[-1] == trace.final
        assert len(trace.terms) == 3

    def test_render_trace(self, two_step):
        text = render_trace(evaluate(two_step, 10))
        assert text.splitlines() == ["IS : (\\y. 0) (S (S 0))", "B : 0", "{B:1, I0:0, IS:1, F:0}"]

    def test_trace_lines_leave_out_counter(self, two_step):
        trace = evaluate(two_step, 10)
        assert trace_lines(trace) == ["IS : (\\y. 0) (S (S 0))", "B : 0"]
        assert render_trace(trace).splitlines()[:-1] == trace_lines(trace)


class TestClassifyNF:
    """Test normal forms and their natures."""

    @pytest.mark.parametrize(
        "source, nature",
        [
            ("\\x. x", Nature.ABS),
            ("0", Nature.NAT),
            ("S S 0", Nature.NAT),
            ("S \\x. x", Nature.STUCK),
            ("(S 0) (\\z. z)", Nature.STUCK),
            ("ifz(\\x. x; 0; m. m)", Nature.STUCK),
            ("(\\x. x) ((S 0) 0)", Nature.STUCK),
            ("(\\x. x) 0", None),
            ("fix f. f", None),
            ("ifz(0; 0; m. m)", None),
        ],
    )
    def test_table(self, source, nature):
        assert classify_nf(parse(source)) is nature

    def test_open_variable_has_no_nature(self):
        assert classify_nf(parse("x")) is None

    @pytest.mark.slow
    @given(closed_terms())
    @settings(max_examples=10_000, deadline=None)
    def test_irreducible_iff_classified(self, t):
        nature = classify_nf(t)
        assert (step_all(t) == []) == (nature is not None)
        if nature is Nature.ABS:
            assert isinstance(t, Abs)
        if nature is Nature.NAT:
            assert is_value(t) and not isinstance(t, Abs)
        if nature is not None and nature.is_proper:
            assert is_value(t)

    @given(closed_terms())
    @settings(max_examples=1000)
    def test_step_det_is_one_of_step_all(self, t):
        chosen = step_det(t)
        every = step_all(t)
        assert (chosen is None) == (not every)
        if chosen is not None:
            assert chosen in every


class TestDiamond:
    """Test one-step confluence and strategy independence."""

    def test_diamond_term_joins(self, diamond_term):
        report = diamond_check(diamond_term)
        assert report.ok
        assert len(report.pairs) == 1
        pair = report.pairs[0]
        assert alpha_eq(pair.join, parse("(S 0) (\\z. z)"))

    def test_no_pairs_for_single_redex(self, doubling):
        assert diamond_check(doubling).pairs == ()

    def test_both_strategies_agree_on_diamond_term(self, diamond_term):
        left = evaluate(diamond_term, 10)
        right = evaluate(diamond_term, 10, Strategy.RIGHT)
        assert left.counter == right.counter == MultiCounter.of(B, I0)
        assert alpha_eq(left.final, right.final)
        assert left.nature is Nature.STUCK

    def test_profiles_of_diamond_term(self, diamond_term):
        profiles = reduction_profiles(diamond_term, 10)
        assert len(profiles) == 1
        (profile,) = profiles
        assert profile.length == 2

    @pytest.mark.slow
    @given(closed_terms())
    @settings(max_examples=10_000, deadline=None)
    def test_diamond_property(self, t):
        assert diamond_check(t).ok

    @pytest.mark.slow
    @given(closed_terms())
    @settings(max_examples=2000, deadline=None)
    def test_strategies_agree(self, t):
        left = evaluate(t, 200)
        right = evaluate(t, 200, Strategy.RIGHT)
        if left.exhausted or right.exhausted:
            return
        assert len(left) == len(right)
        assert left.counter == right.counter
        assert left.nature is right.nature
        assert alpha_eq(left.final, right.final)
