"""
Derivation Transformations
==========================

Constructive metatheory over checked derivations: splitting and merging
value derivations, substitution of values and of fixed points into
derivations, the matching anti-substitutions, subject reduction and subject
expansion along single steps, and tight typing of normal forms.

Every function returns a derivation built with the rule builders, so its
conclusion is recomputed from its premises rather than copied.
"""

from __future__ import annotations

import logging
from typing import Callable, NamedTuple, Optional, Sequence

from derivation import (
    Derivation,
    Rule,
    SubsumptionWitness,
    is_tight,
    t_abs,
    t_app,
    t_fix,
    t_ifsucc,
    t_ifzero,
    t_succ,
    t_var1,
    t_var2,
    t_zero,
)
from evaluation import Nature, Path, Position, RuleName, Step, Trace, classify_nf, reduce_at
from reader import print_term
from syntax import (
    Abs,
    App,
    Fix,
    IfZ,
    Succ,
    Term,
    Var,
    Zero,
    all_names,
    alpha_eq,
    fresh_name,
    free_vars,
    nat_value,
    subst,
)
from typesystem import (
    Multitype,
    MultitypeFamily,
    OptMultitype,
    SuccTy,
    ZeroTy,
    format_multitype,
    format_opt,
    subsumes,
    sum_all,
)


logger = logging.getLogger(__name__)


class TransformError(ValueError):
    """Base class for derivations that cannot be transformed as asked."""


class SubjectMismatch(TransformError):
    pass


class SubsumptionMismatch(TransformError):
    pass


class AssumptionMismatch(TransformError):
    pass


class FamilyMismatch(TransformError):
    pass


class StepMismatch(TransformError):
    pass


class ShapeMismatch(TransformError):
    pass


class NotExpandable(TransformError):
    pass


class NotProperNF(TransformError):
    pass


class ExpansionStep(NamedTuple):
    """``source`` reduces by ``rule`` at ``path`` to the subject being expanded."""

    source: Term
    rule: RuleName
    path: Path = ()


class ValueExtraction(NamedTuple):
    body: Derivation
    value: Derivation
    witness: SubsumptionWitness


class FamilyExtraction(NamedTuple):
    body: Derivation
    parts: tuple[Derivation, ...]


def _expect_rule(d: Derivation, *rules: Rule) -> None:
    if d.rule not in rules:
        expected = " or ".join(r.value for r in rules)
        raise ShapeMismatch(f"expected {expected} for {print_term(d.subject)}, got {d.rule.value}")


# ---------------------------------------------------------------------------
# Substitution inside derivations
# ---------------------------------------------------------------------------


class _Substituter:
    """
    Replays ``subject{name:=replacement}`` on a derivation.

    Subclasses decide what a leaf typing ``name`` becomes. Binders that would
    capture the replacement are renamed the same way ``syntax.subst`` renames
    them, so the rebuilt subjects follow the syntactic substitution.
    """

    def __init__(self, name: str, replacement: Term):
        self.name = name
        self.replacement = replacement

    def leaf(self, d: Derivation) -> Derivation:
        raise NotImplementedError

    def run(self, d: Derivation) -> Derivation:
        if self.name not in free_vars(d.subject):
            return d
        match d.rule:
            case Rule.TVAR1 | Rule.TVAR2:
                return self.leaf(d)
            case Rule.TAPP:
                fun, arg = d.premises
                return t_app(self.run(fun), self.run(arg))
            case Rule.TSUCC:
                return t_succ(self.run(d.premises[0]), d.witness.parts)
            case Rule.TABS:
                target = subst(d.subject, self.name, self.replacement)
                premises = _rename_all(d.premises, d.subject.binder, target.binder)
                return t_abs(target.binder, target.body, [self.run(p) for p in premises])
            case Rule.TIFZERO:
                target = subst(d.subject, self.name, self.replacement)
                guard, then_d = d.premises
                return t_ifzero(self.run(guard), self.run(then_d), target.binder, target.else_branch)
            case Rule.TIFSUCC:
                target = subst(d.subject, self.name, self.replacement)
                guard, else_d = d.premises
                if d.subject.binder != self.name:
                    (else_d,) = _rename_all((else_d,), d.subject.binder, target.binder)
                    else_d = self.run(else_d)
                return t_ifsucc(self.run(guard), else_d, target.then_branch, target.binder)
            case Rule.TFIX:
                target = subst(d.subject, self.name, self.replacement)
                head, *recs = d.premises
                (head,) = _rename_all((head,), d.subject.binder, target.binder)
                return t_fix(target.binder, self.run(head), [self.run(r) for r in recs])
        raise ShapeMismatch(f"{d.rule.value} cannot contain a free {self.name}")


class _Renamer(_Substituter):
    def __init__(self, old: str, new: str):
        super().__init__(old, Var(new))
        self.new = new

    def leaf(self, d: Derivation) -> Derivation:
        if d.rule is Rule.TVAR1:
            return t_var1(self.new, d.result)
        return t_var2(self.new, d.result)


def _rename_all(premises: Sequence[Derivation], old: str, new: str) -> tuple[Derivation, ...]:
    if old == new:
        return tuple(premises)
    renamer = _Renamer(old, new)
    return tuple(renamer.run(p) for p in premises)


class _PieceSubstituter(_Substituter):
    """Consumes one prepared derivation per leaf, first unused match wins."""

    leaf_rule = Rule.TVAR1
    mismatch = AssumptionMismatch

    def __init__(self, name: str, replacement: Term, pieces: Sequence[Derivation]):
        super().__init__(name, replacement)
        self.pieces = list(pieces)
        self.used = [False] * len(self.pieces)

    def leaf(self, d: Derivation) -> Derivation:
        if d.rule is not self.leaf_rule:
            raise self.mismatch(f"{self.name} is typed by {d.rule.value}, expected {self.leaf_rule.value}")
        for index, piece in enumerate(self.pieces):
            if not self.used[index] and piece.result == d.result:
                self.used[index] = True
                return piece
        raise self.mismatch(f"no derivation left for {self.name} at {format_multitype(d.result)}")

    def finish(self) -> None:
        if not all(self.used):
            raise self.mismatch(f"unused derivations for {self.name}")


class _FamilySubstituter(_PieceSubstituter):
    leaf_rule = Rule.TVAR2
    mismatch = FamilyMismatch


def _leaves(d: Derivation, name: str):
    """Axiom leaves typing the free occurrences of ``name``, in premise order."""
    if name not in free_vars(d.subject):
        return
    if d.rule in (Rule.TVAR1, Rule.TVAR2):
        yield d
        return
    for index, premise in enumerate(d.premises):
        if d.rule is Rule.TIFSUCC and index == 1 and d.subject.binder == name:
            continue
        yield from _leaves(premise, name)


# ---------------------------------------------------------------------------
# Value derivations
# ---------------------------------------------------------------------------


def empty_value_deriv(v: Term) -> Derivation:
    """
    The derivation of a value at the empty multitype of its nature.

    Raises:
        NotExpandable: when ``v`` is not a value
    """
    if isinstance(v, Abs):
        return t_abs(v.binder, v.body, [])
    count = nat_value(v)
    if count is None:
        raise NotExpandable(f"{print_term(v)} is not a value")
    d = t_zero(0)
    for _ in range(count):
        d = t_succ(d, [])
    return d


def numeral_deriv(count: int, shape: Multitype) -> Derivation:
    """
    Derivation of the numeral ``S^count 0`` at ``shape``.

    Every member of ``shape`` must be ``0t`` when ``count`` is zero and
    ``succ(N)`` otherwise, recursively.
    """
    if shape.nature is not Nature.NAT:
        raise ShapeMismatch(f"numerals have nat multitypes, not {format_multitype(shape)}")
    if count == 0:
        if not all(isinstance(m, ZeroTy) for m in shape.members):
            raise ShapeMismatch(f"0 cannot have type {format_multitype(shape)}")
        return t_zero(len(shape))
    if not all(isinstance(m, SuccTy) for m in shape.members):
        raise ShapeMismatch(f"S^{count} 0 cannot have type {format_multitype(shape)}")
    preds = tuple(m.pred for m in shape.members)
    return t_succ(numeral_deriv(count - 1, sum_all(preds, Nature.NAT)), preds)


def split_value_deriv(d: Derivation, requests: Sequence[OptMultitype]) -> list[Derivation]:
    """
    Split a value derivation into one derivation per request.

    Args:
        d: Derivation of a value
        requests: Optional multitypes whose sum is the result of ``d``;
            bottom asks for the empty derivation

    Returns:
        Derivations aligned with ``requests``; contexts and counters sum to d's

    Raises:
        SubsumptionMismatch: when the requests do not add up to d's result
    """
    requests = list(requests)
    match d.rule:
        case Rule.TABS:
            return _split_abs(d, requests)
        case Rule.TZERO:
            return _split_zero(d, requests)
        case Rule.TSUCC:
            return _split_succ(d, requests)
    raise ShapeMismatch(f"{d.rule.value} does not type a value")


def _take(pool: list, used: list[bool], predicate) -> int:
    for index, item in enumerate(pool):
        if not used[index] and predicate(item):
            used[index] = True
            return index
    return -1


def _split_abs(d: Derivation, requests: list[OptMultitype]) -> list[Derivation]:
    binder, body = d.subject.binder, d.subject.body
    arrows = [arrow for arrow in d.result.members]
    used = [False] * len(arrows)
    pieces = []
    for request in requests:
        chosen = []
        if request is not None:
            if request.nature is not Nature.ABS:
                raise SubsumptionMismatch(f"cannot type an abstraction at {format_multitype(request)}")
            for member in request.members:
                index = _take(arrows, used, lambda arrow: arrow == member)
                if index < 0:
                    raise SubsumptionMismatch(f"requested arrow is not in {format_multitype(d.result)}")
                chosen.append(d.premises[index])
        pieces.append(t_abs(binder, body, chosen))
    if not all(used):
        raise SubsumptionMismatch("requests do not cover the value's multitype")
    return pieces


def _split_zero(d: Derivation, requests: list[OptMultitype]) -> list[Derivation]:
    pieces = []
    for request in requests:
        size = 0 if request is None else len(request)
        if request is not None and request.nature is not Nature.NAT:
            raise SubsumptionMismatch(f"cannot type 0 at {format_multitype(request)}")
        pieces.append(t_zero(size))
    if sum(len(p.result) for p in pieces) != len(d.result):
        raise SubsumptionMismatch("requests do not cover the value's multitype")
    return pieces


def _split_succ(d: Derivation, requests: list[OptMultitype]) -> list[Derivation]:
    (inner,) = d.premises
    parts = list(d.witness.parts)
    used = [False] * len(parts)
    assigned: list[list[Multitype]] = []
    for request in requests:
        chosen = []
        if request is not None:
            if request.nature is not Nature.NAT:
                raise SubsumptionMismatch(f"cannot type a numeral at {format_multitype(request)}")
            for member in request.members:
                index = _take(parts, used, lambda part: SuccTy(part) == member)
                if index < 0:
                    raise SubsumptionMismatch(f"requested member is not in {format_multitype(d.result)}")
                chosen.append(parts[index])
        assigned.append(chosen)
    if not all(used):
        raise SubsumptionMismatch("requests do not cover the value's multitype")
    inner_requests = [sum_all(chosen, Nature.NAT) for chosen in assigned]
    inner_pieces = split_value_deriv(inner, inner_requests)
    return [t_succ(piece, chosen) for piece, chosen in zip(inner_pieces, assigned)]


def merge_value_derivs(
    value: Term, parts: Sequence[tuple[Derivation, OptMultitype]]
) -> Derivation:
    """
    Merge derivations of the same value into one at the sum of their results.

    Args:
        value: The value every part types
        parts: Pairs of a derivation and the optional multitype it must
            subsume to

    Returns:
        Derivation of ``value`` with summed contexts, counters and results;
        the empty derivation of ``value`` when ``parts`` is empty
    """
    derivs = []
    for d, target in parts:
        if not alpha_eq(d.subject, value):
            raise SubjectMismatch(f"{print_term(d.subject)} is not {print_term(value)}")
        if not subsumes(target, d.result):
            raise SubsumptionMismatch(f"{format_opt(target)} does not subsume {format_multitype(d.result)}")
        derivs.append(d)
    return _merge(value, derivs)


def _merge(value: Term, derivs: list[Derivation]) -> Derivation:
    if not derivs:
        return empty_value_deriv(value)
    match value:
        case Abs(binder, body):
            premises = []
            for d in derivs:
                _expect_rule(d, Rule.TABS)
                premises.extend(_rename_all(d.premises, d.subject.binder, binder))
            return t_abs(binder, body, premises)
        case Zero():
            for d in derivs:
                _expect_rule(d, Rule.TZERO)
            return t_zero(sum(len(d.result) for d in derivs))
        case Succ(inner):
            splits = []
            for d in derivs:
                _expect_rule(d, Rule.TSUCC)
                splits.extend(d.witness.parts)
            return t_succ(_merge(inner, [d.premises[0] for d in derivs]), splits)
    raise NotExpandable(f"{print_term(value)} is not a value")


def subst_value_deriv(body: Derivation, x: str, value: Derivation) -> Derivation:
    """
    Substitute a value derivation for the value-bound variable ``x``.

    Args:
        body: Derivation whose typing context assigns ``x`` (or bottom)
        x: The substituted variable
        value: Derivation of the value at a multitype subsumed by x's assumption

    Returns:
        Derivation of ``body.subject{x:=value.subject}`` with the same result,
        contexts ``body - x + value`` and counter ``body + value``
    """
    if x in body.family:
        raise AssumptionMismatch(f"{x} is fix-bound in the body derivation")
    assumption = body.typing.at(x)
    if not subsumes(assumption, value.result):
        raise SubsumptionMismatch(
            f"{format_opt(assumption)} does not subsume {format_multitype(value.result)}"
        )
    leaves = list(_leaves(body, x))
    if any(leaf.rule is not Rule.TVAR1 for leaf in leaves):
        raise AssumptionMismatch(f"{x} is typed as a fix-bound variable")
    pieces = split_value_deriv(value, [leaf.result for leaf in leaves])
    substituter = _PieceSubstituter(x, value.subject, pieces)
    result = substituter.run(body)
    substituter.finish()
    return result


def subst_family_deriv(body: Derivation, x: str, q: Term, parts: Sequence[Derivation]) -> Derivation:
    """
    Substitute ``q`` for the fix-bound variable ``x``, one part per family member.

    Raises:
        FamilyMismatch: when the parts' results do not match x's family
    """
    if x in body.typing:
        raise AssumptionMismatch(f"{x} is value-bound in the body derivation")
    for part in parts:
        if not alpha_eq(part.subject, q):
            raise SubjectMismatch(f"{print_term(part.subject)} is not {print_term(q)}")
    if body.family.at(x) != MultitypeFamily(tuple(p.result for p in parts)):
        raise FamilyMismatch(f"parts do not match the family assigned to {x}")
    substituter = _FamilySubstituter(x, q, parts)
    result = substituter.run(body)
    substituter.finish()
    return result


# ---------------------------------------------------------------------------
# Subject reduction
# ---------------------------------------------------------------------------


def subject_reduce(d: Derivation, step: Step) -> Derivation:
    """
    Follow one reduction step of the subject.

    The result keeps d's contexts and result; its counter is d's minus
    ``step.rule``.

    Raises:
        StepMismatch: when ``step`` is not a step of d's subject
    """
    try:
        fired = reduce_at(d.subject, step.path)
    except ValueError:
        fired = None
    if fired is None or fired.rule != step.rule or not alpha_eq(fired.term, step.term):
        raise StepMismatch(f"{step.rule.value} at {list(step.path)} is not a step of {print_term(d.subject)}")
    return _reduce_at(d, tuple(Position(p) for p in step.path))


def _reduce_at(d: Derivation, path: tuple[Position, ...]) -> Derivation:
    if not path:
        return _reduce_root(d)
    label, rest = path[0], path[1:]
    match label:
        case Position.FUN:
            _expect_rule(d, Rule.TAPP)
            fun, arg = d.premises
            return t_app(_reduce_at(fun, rest), arg)
        case Position.ARG:
            _expect_rule(d, Rule.TAPP)
            fun, arg = d.premises
            return t_app(fun, _reduce_at(arg, rest))
        case Position.INNER:
            _expect_rule(d, Rule.TSUCC)
            return t_succ(_reduce_at(d.premises[0], rest), d.witness.parts)
        case Position.GUARD:
            _expect_rule(d, Rule.TIFZERO, Rule.TIFSUCC)
            guard, branch = d.premises
            ifz = d.subject
            if d.rule is Rule.TIFZERO:
                return t_ifzero(_reduce_at(guard, rest), branch, ifz.binder, ifz.else_branch)
            return t_ifsucc(_reduce_at(guard, rest), branch, ifz.then_branch, ifz.binder)
    raise StepMismatch(f"unknown position {label}")


def _reduce_root(d: Derivation) -> Derivation:
    match d.subject:
        case App(Abs(), _):
            _expect_rule(d, Rule.TAPP)
            fun, arg = d.premises
            _expect_rule(fun, Rule.TABS)
            if len(fun.premises) != 1:
                raise ShapeMismatch("the applied abstraction must be typed by exactly one premise")
            # premises may name the binder differently from the conclusion
            return subst_value_deriv(fun.premises[0], fun.subject.binder, arg)
        case IfZ(Zero(), _, _, _):
            _expect_rule(d, Rule.TIFZERO)
            return d.premises[1]
        case IfZ(Succ(_), _, binder, _):
            _expect_rule(d, Rule.TIFSUCC)
            guard, else_d = d.premises
            _expect_rule(guard, Rule.TSUCC)
            return subst_value_deriv(else_d, binder, guard.premises[0])
        case Fix(binder, _):
            _expect_rule(d, Rule.TFIX)
            head, *recs = d.premises
            return subst_family_deriv(head, binder, d.subject, recs)
    raise StepMismatch(f"{print_term(d.subject)} is not a redex")


def drain_along(d: Derivation, trace: Trace) -> list[Derivation]:
    """
    Apply subject reduction along every step of a trace.

    Returns:
        ``d`` followed by one derivation per step
    """
    if not alpha_eq(d.subject, trace.initial):
        raise SubjectMismatch("derivation and trace start from different terms")
    derivations = [d]
    for step in trace.steps:
        d = subject_reduce(d, step)
        logger.debug("reduced by %s, counter %s", step.rule.value, d.counter)
        derivations.append(d)
    return derivations


# ---------------------------------------------------------------------------
# Anti-substitution and subject expansion
# ---------------------------------------------------------------------------


class _Extractor:
    """
    Walks ``t`` and a derivation of ``t{x:=replacement}`` side by side.

    At each occurrence of ``x`` the derivation of the replacement is cut out
    and an axiom for ``x`` is planted in its place.
    """

    def __init__(self, x: str, replacement: Term):
        self.x = x
        self.replacement = replacement
        self.replacement_fv = free_vars(replacement)
        self.pieces: list[Derivation] = []

    def plant(self, d: Derivation) -> Derivation:
        raise NotImplementedError

    def walk(self, d: Derivation, t: Term) -> Derivation:
        if self.x not in free_vars(t):
            return d
        match t:
            case Var():
                if not alpha_eq(d.subject, self.replacement):
                    raise ShapeMismatch(f"{print_term(d.subject)} is not {print_term(self.replacement)}")
                self.pieces.append(d)
                return self.plant(d)
            case App(fun, arg):
                _expect_rule(d, Rule.TAPP)
                fun_d, arg_d = d.premises
                return t_app(self.walk(fun_d, fun), self.walk(arg_d, arg))
            case Succ(inner):
                _expect_rule(d, Rule.TSUCC)
                return t_succ(self.walk(d.premises[0], inner), d.witness.parts)
            case Abs(binder, body):
                _expect_rule(d, Rule.TABS)
                binder, body, premises = self._align(d.subject.binder, binder, body, d.premises)
                return t_abs(binder, body, [self.walk(p, body) for p in premises])
            case Fix(binder, body):
                _expect_rule(d, Rule.TFIX)
                head, *recs = d.premises
                binder, body, (head,) = self._align(d.subject.binder, binder, body, (head,))
                aligned = Fix(binder, body)
                return t_fix(binder, self.walk(head, body), [self.walk(r, aligned) for r in recs])
            case IfZ(guard, then_branch, binder, else_branch):
                _expect_rule(d, Rule.TIFZERO, Rule.TIFSUCC)
                guard_d, branch_d = d.premises
                new_guard = self.walk(guard_d, guard)
                if d.rule is Rule.TIFZERO:
                    return t_ifzero(new_guard, self.walk(branch_d, then_branch), binder, else_branch)
                if binder == self.x or self.x not in free_vars(else_branch):
                    return t_ifsucc(new_guard, branch_d, then_branch, d.subject.binder)
                binder, else_branch, (branch_d,) = self._align(
                    d.subject.binder, binder, else_branch, (branch_d,)
                )
                return t_ifsucc(new_guard, self.walk(branch_d, else_branch), then_branch, binder)
        raise ShapeMismatch(f"cannot align {print_term(t)} with {d.rule.value}")

    def _align(self, d_binder: str, t_binder: str, t_body: Term, premises: Sequence[Derivation]):
        """Give the derivation side and the term side the same binder name."""
        if d_binder == t_binder and t_binder not in self.replacement_fv:
            return t_binder, t_body, tuple(premises)
        avoid = set(all_names(t_body)) | all_names(self.replacement) | {self.x, d_binder, t_binder}
        for p in premises:
            avoid |= all_names(p.subject)
        z = fresh_name(t_binder, avoid)
        return z, subst(t_body, t_binder, Var(z)), _rename_all(premises, d_binder, z)


class _ValueExtractor(_Extractor):
    def plant(self, d: Derivation) -> Derivation:
        return t_var1(self.x, d.result)


class _FamilyExtractor(_Extractor):
    def plant(self, d: Derivation) -> Derivation:
        return t_var2(self.x, d.result)


def anti_subst_value(d: Derivation, t: Term, x: str, v: Term) -> ValueExtraction:
    """
    Undo a value substitution: from a derivation of ``t{x:=v}`` recover a
    derivation of ``t`` assuming ``x`` and one of ``v``.

    Returns:
        The body derivation, the merged value derivation and the subsumption
        pair between x's assumption and the value's result
    """
    extractor = _ValueExtractor(x, v)
    body = extractor.walk(d, t)
    value = merge_value_derivs(v, [(piece, piece.result) for piece in extractor.pieces])
    return ValueExtraction(body, value, SubsumptionWitness(body.typing.at(x), value.result))


def anti_subst_family(d: Derivation, t: Term, x: str, q: Term) -> FamilyExtraction:
    """Undo a fix substitution; the parts follow the left-to-right order of x's occurrences."""
    extractor = _FamilyExtractor(x, q)
    body = extractor.walk(d, t)
    return FamilyExtraction(body, tuple(extractor.pieces))


def subject_expand(d: Derivation, step: ExpansionStep) -> Derivation:
    """
    Type the source of a reduction step from a derivation of its reduct.

    The result has d's contexts and result and one more ``step.rule`` in its
    counter.

    Raises:
        StepMismatch: when ``step.source`` does not reduce to d's subject
    """
    try:
        fired = reduce_at(step.source, step.path)
    except ValueError:
        fired = None
    if fired is None or fired.rule != step.rule:
        raise StepMismatch(f"{step.rule.value} at {list(step.path)} is not a step of {print_term(step.source)}")
    if not alpha_eq(fired.term, d.subject):
        raise StepMismatch(f"{print_term(step.source)} does not reduce to {print_term(d.subject)}")
    return _expand_at(d, step.source, tuple(Position(p) for p in step.path))


def _expand_at(d: Derivation, source: Term, path: tuple[Position, ...]) -> Derivation:
    if not path:
        return _expand_root(d, source)
    label, rest = path[0], path[1:]
    match label:
        case Position.FUN:
            _expect_rule(d, Rule.TAPP)
            fun, arg = d.premises
            return t_app(_expand_at(fun, source.fun, rest), arg)
        case Position.ARG:
            _expect_rule(d, Rule.TAPP)
            fun, arg = d.premises
            return t_app(fun, _expand_at(arg, source.arg, rest))
        case Position.INNER:
            _expect_rule(d, Rule.TSUCC)
            return t_succ(_expand_at(d.premises[0], source.inner, rest), d.witness.parts)
        case Position.GUARD:
            _expect_rule(d, Rule.TIFZERO, Rule.TIFSUCC)
            guard, branch = d.premises
            ifz = d.subject
            if d.rule is Rule.TIFZERO:
                return t_ifzero(_expand_at(guard, source.guard, rest), branch, ifz.binder, ifz.else_branch)
            return t_ifsucc(_expand_at(guard, source.guard, rest), branch, ifz.then_branch, ifz.binder)
    raise StepMismatch(f"unknown position {label}")


def _expand_root(d: Derivation, source: Term) -> Derivation:
    match source:
        case App(Abs(binder, body), arg):
            body_d, value_d, _ = anti_subst_value(d, body, binder, arg)
            return t_app(t_abs(binder, body, [body_d]), value_d)
        case IfZ(Zero(), _, binder, else_branch):
            return t_ifzero(t_zero(1), d, binder, else_branch)
        case IfZ(Succ(pred), then_branch, binder, else_branch):
            body_d, value_d, _ = anti_subst_value(d, else_branch, binder, pred)
            return t_ifsucc(t_succ(value_d, [value_d.result]), body_d, then_branch, binder)
        case Fix(binder, body):
            body_d, parts = anti_subst_family(d, body, binder, source)
            return t_fix(binder, body_d, parts)
    raise NotExpandable(f"{print_term(source)} is not a redex")


def nf_tight_deriv(t: Term) -> Derivation:
    """
    Tight derivation of a normal form of nature abs or nat.

    Raises:
        NotProperNF: for stuck or reducible terms
    """
    nature = classify_nf(t)
    if nature not in (Nature.ABS, Nature.NAT):
        what = "reducible or open" if nature is None else nature.value
        raise NotProperNF(f"{print_term(t)} is not a proper normal form ({what})")
    return empty_value_deriv(t)


def expand_along(
    d: Derivation,
    trace: Trace,
    *,
    require_tight: bool = False,
    check: Optional[Callable[[Derivation], object]] = None,
) -> Derivation:
    """
    Replay subject expansion backwards along a trace.

    Args:
        d: Derivation of the trace's final term
        trace: The reduction sequence to walk back
        require_tight: Fail as soon as an intermediate derivation is not tight
        check: Optional callable run on every intermediate derivation

    Returns:
        Derivation of the trace's initial term
    """
    if not alpha_eq(d.subject, trace.final):
        raise SubjectMismatch("derivation does not type the end of the trace")
    terms = trace.terms
    for index in range(len(trace.steps) - 1, -1, -1):
        step = trace.steps[index]
        d = subject_expand(d, ExpansionStep(terms[index], step.rule, step.path))
        logger.debug("expanded by %s, counter %s", step.rule.value, d.counter)
        if check is not None:
            check(d)
        if require_tight and not is_tight(d):
            raise NotExpandable(f"expansion by {step.rule.value} lost tightness")
    return d

