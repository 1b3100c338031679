"""
Tests for multitypes and contexts
=================================
"""

from functools import reduce

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evaluation import Nature
from reader import ParseError
from strategies import multitypes, sub_multitypes
from typesystem import (
    Arrow,
    FamilyContext,
    IncompatibleNatures,
    MalformedType,
    Multitype,
    MultitypeFamily,
    SuccTy,
    TypingContext,
    ZeroTy,
    abs_multitype,
    canonicalize,
    compatible,
    empty,
    format_family,
    format_multitype,
    format_opt,
    format_typing_ctx,
    nat_multitype,
    parse_family,
    parse_multitype,
    parse_opt,
    splits,
    subsumes,
    sum_all,
    sum_family_ctx,
    sum_multitype,
    sum_opt,
    sum_typing_ctx,
)


NAT0 = empty(Nature.NAT)
ABS0 = empty(Nature.ABS)
ZERO_ONE = nat_multitype(ZeroTy())


class TestMultitype:
    """Test construction and multiset equality."""

    def test_members_must_fit_nature(self):
        with pytest.raises(MalformedType):
            Multitype(Nature.NAT, (Arrow(None, NAT0),))
        with pytest.raises(MalformedType):
            Multitype(Nature.ABS, (ZeroTy(),))

    def test_stuck_is_not_a_multitype_nature(self):
        with pytest.raises(MalformedType):
            Multitype(Nature.STUCK)

    def test_succ_needs_nat(self):
        with pytest.raises(MalformedType):
            SuccTy(ABS0)

    def test_order_does_not_matter(self):
        a = nat_multitype(ZeroTy(), SuccTy(NAT0))
        b = nat_multitype(SuccTy(NAT0), ZeroTy())
        assert a == b
        assert hash(a) == hash(b)

    def test_multiplicity_matters(self):
        assert nat_multitype(ZeroTy()) != nat_multitype(ZeroTy(), ZeroTy())

    def test_empty_multitypes_differ_by_nature(self):
        assert NAT0 != ABS0
        assert NAT0.is_empty and ABS0.is_empty


class TestSums:
    """Test sums and compatibility."""

    def test_sum(self):
        a = nat_multitype(ZeroTy())
        assert sum_multitype(a, a) == nat_multitype(ZeroTy(), ZeroTy())

    def test_incompatible_sum(self):
        with pytest.raises(IncompatibleNatures):
            sum_multitype(NAT0, ABS0)

    def test_bottom_is_neutral(self):
        a = nat_multitype(ZeroTy())
        assert sum_opt(None, a) == a
        assert sum_opt(a, None) == a
        assert sum_opt(None, None) is None

    def test_compatible(self):
        assert compatible(None, ABS0)
        assert compatible(NAT0, nat_multitype(ZeroTy()))
        assert not compatible(NAT0, ABS0)

    def test_sum_all_of_nothing(self):
        assert sum_all([], Nature.ABS) == ABS0

    @given(multitypes(), multitypes())
    @settings(max_examples=300)
    def test_sum_is_commutative(self, a, b):
        if a.nature is b.nature:
            assert sum_multitype(a, b) == sum_multitype(b, a)


class TestSubsumption:
    """Test subsumption of optional multitypes."""

    def test_bottom_subsumed_by_both_empties(self):
        assert subsumes(None, NAT0)
        assert subsumes(None, ABS0)

    def test_bottom_not_subsumed_by_non_empty(self):
        assert not subsumes(None, nat_multitype(ZeroTy()))

    def test_multitype_subsumed_only_by_itself(self):
        a = nat_multitype(ZeroTy())
        assert subsumes(a, a)
        assert not subsumes(NAT0, ABS0)


class TestContexts:
    """Test typing and family contexts."""

    def test_bottom_entries_dropped(self):
        ctx = TypingContext({"x": None, "y": NAT0})
        assert ctx.domain == {"y"}
        assert ctx.at("x") is None

    def test_pointwise_sum(self):
        a = TypingContext({"x": nat_multitype(ZeroTy())})
        b = TypingContext({"x": nat_multitype(ZeroTy()), "y": ABS0})
        total = sum_typing_ctx(a, b)
        assert total["x"] == nat_multitype(ZeroTy(), ZeroTy())
        assert total["y"] == ABS0

    def test_incompatible_context_sum_names_variable(self):
        with pytest.raises(IncompatibleNatures) as exc:
            sum_typing_ctx(TypingContext({"x": NAT0}), TypingContext({"x": ABS0}))
        assert exc.value.variable == "x"

    def test_family_context(self):
        fam = MultitypeFamily((NAT0,))
        a = FamilyContext({"f": fam})
        b = FamilyContext({"f": MultitypeFamily((ABS0,)), "g": MultitypeFamily()})
        total = sum_family_ctx(a, b)
        assert total.at("f") == MultitypeFamily((ABS0, NAT0))
        assert total.domain == {"f"}
        assert b.at("g") == MultitypeFamily()

    def test_renamed_and_without(self):
        ctx = TypingContext({"x": NAT0, "y": ABS0})
        assert ctx.without("x").domain == {"y"}
        assert ctx.renamed("x", "z").at("z") == NAT0


class TestCanonicalize:
    """Test the canonical member order."""

    def test_zero_before_succ_before_arrow(self):
        m = nat_multitype(SuccTy(NAT0), ZeroTy())
        assert canonicalize(m).members == (ZeroTy(), SuccTy(NAT0))

    @given(multitypes(depth=2))
    @settings(max_examples=300)
    def test_canonical_form_is_equal_and_stable(self, m):
        c = canonicalize(m)
        assert c == m
        assert canonicalize(c).members == c.members


class TestSplits:
    """Test enumeration of two-way splits."""

    def test_splits_of_pair(self):
        m = nat_multitype(ZeroTy(), SuccTy(NAT0))
        assert len(list(splits(m))) == 4

    def test_splits_of_repeated_member(self):
        m = nat_multitype(ZeroTy(), ZeroTy())
        assert len(list(splits(m))) == 3

    @given(multitypes(max_members=6))
    @settings(max_examples=300)
    def test_every_split_sums_back(self, m):
        seen = set()
        for left, right in splits(m):
            assert sum_multitype(left, right) == m
            assert (left, right) not in seen
            seen.add((left, right))


def _decompositions(target: Multitype, count: int):
    """Every way to write ``target`` as an ordered sum of ``count`` multitypes."""
    if count == 0:
        if target.is_empty:
            yield ()
        return
    for left, right in splits(target):
        for rest in _decompositions(right, count - 1):
            yield (left, *rest)


def _summand(target: Multitype, fitted: Multitype):
    """Either the fitted part, bottom, or an arbitrary multitype of the same nature."""
    return st.one_of(
        st.just(fitted),
        st.none(),
        multitypes(max_members=3).filter(lambda m: m.nature is target.nature),
    )


class TestSubsumedSums:
    """A subsumed sum splits into subsumed parts, and back."""

    @given(st.data())
    @settings(max_examples=500, deadline=None)
    def test_two_summands(self, data):
        target = data.draw(multitypes(max_members=6))
        left = data.draw(sub_multitypes(target))
        rest = [ty for ty in target.members]
        for ty in left.members:
            rest.remove(ty)
        a = data.draw(_summand(target, left))
        b = data.draw(_summand(target, Multitype(target.nature, tuple(rest))))
        whole = subsumes(sum_opt(a, b), target)
        parts = any(subsumes(a, t1) and subsumes(b, t2) for t1, t2 in splits(target))
        assert whole == parts

    @given(st.data())
    @settings(max_examples=300, deadline=None)
    def test_many_summands(self, data):
        target = data.draw(multitypes(max_members=4))
        count = data.draw(st.integers(1, 3))
        owners = data.draw(st.lists(st.integers(0, count - 1), min_size=len(target), max_size=len(target)))
        groups = [
            Multitype(target.nature, tuple(ty for ty, owner in zip(target.members, owners) if owner == index))
            for index in range(count)
        ]
        summands = [data.draw(_summand(target, group)) for group in groups]
        whole = subsumes(reduce(sum_opt, summands, None), target)
        parts = any(
            all(subsumes(s, t) for s, t in zip(summands, pieces))
            for pieces in _decompositions(target, count)
        )
        assert whole == parts

    @pytest.mark.parametrize(
        "target, holds",
        [
            (NAT0, True),
            (ABS0, True),
            (nat_multitype(ZeroTy()), False),
            (abs_multitype(Arrow(None, NAT0)), False),
        ],
    )
    def test_no_summands(self, target, holds):
        # the empty sum is bottom
        assert subsumes(reduce(sum_opt, [], None), target) == holds
        assert any(True for _ in _decompositions(target, 0)) == holds

    def test_bottom_forces_empty_part(self):
        target = nat_multitype(ZeroTy())
        assert not subsumes(None, target)
        assert [(t1, t2) for t1, t2 in splits(target) if subsumes(None, t1) and subsumes(ZERO_ONE, t2)] == [
            (NAT0, target)
        ]


class TestTypeText:
    """Test formatting and reading of types."""

    def test_format(self):
        arrow = abs_multitype(Arrow(NAT0, ABS0))
        assert format_multitype(arrow) == "[[]nat -> []abs]abs"
        assert format_opt(None) == "bot"
        assert format_family(MultitypeFamily((NAT0,))) == "<[]nat>"

    def test_format_context_sorted(self):
        ctx = TypingContext({"y": NAT0, "x": ABS0})
        assert format_typing_ctx(ctx) == "x:[]abs, y:[]nat"

    def test_parse(self):
        assert parse_multitype("[0t, succ([]nat)]nat") == nat_multitype(ZeroTy(), SuccTy(NAT0))
        assert parse_multitype("[bot -> []nat]abs") == abs_multitype(Arrow(None, NAT0))
        assert parse_opt("bot") is None
        assert parse_family("<[]nat, []abs>") == MultitypeFamily((NAT0, ABS0))
        assert parse_family("<>") == MultitypeFamily()

    def test_parse_rejects_wrong_nature(self):
        with pytest.raises(ParseError):
            parse_multitype("[0t]abs")

    def test_parse_rejects_garbage(self):
        with pytest.raises(ParseError):
            parse_multitype("[0t")

    @given(multitypes(depth=2))
    @settings(max_examples=300)
    def test_format_then_parse(self, m):
        assert parse_multitype(format_multitype(m)) == m
