"""
Typing Derivations
==================

Derivations of the quantitative type system as explicit trees, builders
for each typing rule, an independent checker, and the JSON form used by
the command line.

Each node stores its conclusion, its premises in rule order and the
witness the rule needs (binder assumptions, a subsumption pair, a split or
a family), so checking never has to search.

Premise order per rule:
    t-app     function, argument
    t-ifzero  guard, then-branch
    t-ifsucc  guard, else-branch
    t-fix     body, then one premise per family member
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, Optional, Sequence, Union

from evaluation import EMPTY_COUNTER, MultiCounter, Nature, RuleName
from reader import ParseError, parse_term, print_term
from syntax import Abs, App, Fix, IfZ, Succ, Term, Var, Zero, alpha_eq, free_vars
from typesystem import (
    Arrow,
    FamilyContext,
    IncompatibleNatures,
    MalformedType,
    Multitype,
    MultitypeFamily,
    OptMultitype,
    SuccTy,
    TypeH,
    TypingContext,
    ZeroTy,
    canonicalize,
    format_family_ctx,
    format_multitype,
    format_typing_ctx,
    subsumes,
    sum_all,
    sum_family_ctx,
    sum_typing_ctx,
)


logger = logging.getLogger(__name__)


class Rule(str, Enum):
    TVAR1 = "t-var1"
    TVAR2 = "t-var2"
    TABS = "t-abs"
    TAPP = "t-app"
    TZERO = "t-zero"
    TSUCC = "t-succ"
    TIFZERO = "t-ifzero"
    TIFSUCC = "t-ifsucc"
    TFIX = "t-fix"


# Rule name contributed to the multi-counter by each counting rule.
COUNTED_RULES = {
    Rule.TAPP: RuleName.B,
    Rule.TIFZERO: RuleName.I0,
    Rule.TIFSUCC: RuleName.IS,
    Rule.TFIX: RuleName.F,
}


class CheckFailure(str, Enum):
    RULE_SHAPE = "rule shape"
    SUM_MISMATCH = "sum mismatch"
    SUBSUMPTION_FAILURE = "subsumption failure"
    COUNTER_MISMATCH = "counter mismatch"
    RELEVANCE_VIOLATION = "relevance violation"
    DISJOINTNESS_VIOLATION = "disjointness violation"
    INCOMPATIBLE_SUM = "incompatible sum"
    ZERO_MULTIPLICITY = "zero multiplicity"


class CheckError(ValueError):
    """A node of a derivation does not follow its rule."""

    def __init__(self, path: Sequence[int], reason: CheckFailure, detail: str):
        super().__init__(f"{reason.value} at {list(path)}: {detail}")
        self.path = tuple(path)
        self.reason = reason
        self.detail = detail


class DecodeError(ValueError):
    """Raised for JSON that does not describe a derivation."""


@dataclass(frozen=True)
class Judgment:
    family: FamilyContext
    typing: TypingContext
    counter: MultiCounter
    subject: Term
    result: Multitype

    def matches(self, other: "Judgment") -> bool:
        """Same contexts, counter and result, subjects equal up to alpha."""
        return (
            self.family == other.family
            and self.typing == other.typing
            and self.counter == other.counter
            and self.result == other.result
            and alpha_eq(self.subject, other.subject)
        )


@dataclass(frozen=True)
class AbsWitness:
    """Assumption on the abstraction binder in each premise."""

    binders: tuple[OptMultitype, ...]


@dataclass(frozen=True)
class SubsumptionWitness:
    """``assumption`` is subsumed by ``subsumed``."""

    assumption: OptMultitype
    subsumed: Multitype


@dataclass(frozen=True)
class SplitWitness:
    """Predecessor multitypes, one per member of the t-succ conclusion."""

    parts: tuple[Multitype, ...]


@dataclass(frozen=True)
class FamilyWitness:
    """Family assigned to the fix binder, aligned with the recursive premises."""

    members: tuple[Multitype, ...]


Witness = Union[AbsWitness, SubsumptionWitness, SplitWitness, FamilyWitness, None]


@dataclass(frozen=True)
class Derivation:
    rule: Rule
    conclusion: Judgment
    premises: tuple["Derivation", ...] = ()
    witness: Witness = None

    @property
    def subject(self) -> Term:
        return self.conclusion.subject

    @property
    def result(self) -> Multitype:
        return self.conclusion.result

    @property
    def counter(self) -> MultiCounter:
        return self.conclusion.counter

    @property
    def typing(self) -> TypingContext:
        return self.conclusion.typing

    @property
    def family(self) -> FamilyContext:
        return self.conclusion.family


def _sum_counters(counters: Iterable[MultiCounter]) -> MultiCounter:
    total = EMPTY_COUNTER
    for c in counters:
        total = total + c
    return total


def _sum_typing(contexts: Iterable[TypingContext]) -> TypingContext:
    total = TypingContext()
    for ctx in contexts:
        total = sum_typing_ctx(total, ctx)
    return total


def _sum_family(contexts: Iterable[FamilyContext]) -> FamilyContext:
    total = FamilyContext()
    for ctx in contexts:
        total = sum_family_ctx(total, ctx)
    return total


def _singleton_arrow(m: Multitype) -> Optional[Arrow]:
    if m.nature is Nature.ABS and len(m) == 1:
        return m.members[0]
    return None


def _singleton_succ(m: Multitype) -> Optional[SuccTy]:
    if m.nature is Nature.NAT and len(m) == 1 and isinstance(m.members[0], SuccTy):
        return m.members[0]
    return None


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def t_var1(x: str, ty: Multitype) -> Derivation:
    """Axiom for a value-bound variable: ``x : T |- x : T``."""
    judgment = Judgment(FamilyContext(), TypingContext({x: ty}), EMPTY_COUNTER, Var(x), ty)
    return Derivation(Rule.TVAR1, judgment)


def t_var2(x: str, ty: Multitype) -> Derivation:
    """Axiom for a fix-bound variable: ``x : <T> |- x : T``."""
    family = FamilyContext({x: MultitypeFamily((ty,))})
    judgment = Judgment(family, TypingContext(), EMPTY_COUNTER, Var(x), ty)
    return Derivation(Rule.TVAR2, judgment)


def t_abs(binder: str, body: Term, premises: Sequence[Derivation]) -> Derivation:
    """
    Abstraction over any number of premises typing ``body``.

    Args:
        binder: The abstraction's bound variable
        body: The abstraction body (needed when there are no premises)
        premises: Derivations of ``body``, one per arrow of the result

    Returns:
        Derivation of ``\\binder. body`` at ``[T_i? -> S_i]abs``
    """
    premises = tuple(premises)
    binders = tuple(p.typing.at(binder) for p in premises)
    result = Multitype(Nature.ABS, tuple(Arrow(a, p.result) for a, p in zip(binders, premises)))
    judgment = Judgment(
        _sum_family(p.family for p in premises),
        _sum_typing(p.typing.without(binder) for p in premises),
        _sum_counters(p.counter for p in premises),
        Abs(binder, body),
        result,
    )
    return Derivation(Rule.TABS, judgment, premises, AbsWitness(binders))


def t_app(fun: Derivation, arg: Derivation) -> Derivation:
    """Application; ``fun`` must conclude a single arrow."""
    arrow = _singleton_arrow(fun.result)
    if arrow is None:
        raise CheckError((), CheckFailure.RULE_SHAPE, "function premise must have a single arrow type")
    judgment = Judgment(
        sum_family_ctx(fun.family, arg.family),
        sum_typing_ctx(fun.typing, arg.typing),
        MultiCounter.of(RuleName.B) + fun.counter + arg.counter,
        App(fun.subject, arg.subject),
        arrow.result,
    )
    return Derivation(Rule.TAPP, judgment, (fun, arg), SubsumptionWitness(arrow.argument, arg.result))


def t_zero(multiplicity: int = 0) -> Derivation:
    """``|- 0 : [0t, ..., 0t]nat`` with ``multiplicity`` members."""
    result = Multitype(Nature.NAT, (ZeroTy(),) * multiplicity)
    return Derivation(Rule.TZERO, Judgment(FamilyContext(), TypingContext(), EMPTY_COUNTER, Zero(), result))


def t_succ(inner: Derivation, split: Sequence[Multitype]) -> Derivation:
    """Successor; ``split`` lists the predecessor multitypes summing to the premise result."""
    split = tuple(split)
    result = Multitype(Nature.NAT, tuple(SuccTy(part) for part in split))
    judgment = Judgment(inner.family, inner.typing, inner.counter, Succ(inner.subject), result)
    return Derivation(Rule.TSUCC, judgment, (inner,), SplitWitness(split))


def t_ifzero(guard: Derivation, then_d: Derivation, binder: str, else_branch: Term) -> Derivation:
    """Conditional taking the zero branch; the else branch stays untyped."""
    judgment = Judgment(
        sum_family_ctx(guard.family, then_d.family),
        sum_typing_ctx(guard.typing, then_d.typing),
        MultiCounter.of(RuleName.I0) + guard.counter + then_d.counter,
        IfZ(guard.subject, then_d.subject, binder, else_branch),
        then_d.result,
    )
    return Derivation(Rule.TIFZERO, judgment, (guard, then_d))


def t_ifsucc(guard: Derivation, else_d: Derivation, then_branch: Term, binder: str) -> Derivation:
    """Conditional taking the successor branch; the then branch stays untyped."""
    succ = _singleton_succ(guard.result)
    if succ is None:
        raise CheckError((), CheckFailure.RULE_SHAPE, "guard premise must have type [succ(N)]nat")
    judgment = Judgment(
        sum_family_ctx(guard.family, else_d.family),
        sum_typing_ctx(guard.typing, else_d.typing.without(binder)),
        MultiCounter.of(RuleName.IS) + guard.counter + else_d.counter,
        IfZ(guard.subject, then_branch, binder, else_d.subject),
        else_d.result,
    )
    witness = SubsumptionWitness(else_d.typing.at(binder), succ.pred)
    return Derivation(Rule.TIFSUCC, judgment, (guard, else_d), witness)


def t_fix(binder: str, head: Derivation, recs: Sequence[Derivation]) -> Derivation:
    """Fixed point; ``recs`` type the fix term at each member of the binder's family."""
    recs = tuple(recs)
    members = tuple(r.result for r in recs)
    judgment = Judgment(
        _sum_family([head.family.without(binder), *(r.family for r in recs)]),
        _sum_typing([head.typing, *(r.typing for r in recs)]),
        MultiCounter.of(RuleName.F) + head.counter + _sum_counters(r.counter for r in recs),
        Fix(binder, head.subject),
        head.result,
    )
    return Derivation(Rule.TFIX, judgment, (head, *recs), FamilyWitness(members))


# ---------------------------------------------------------------------------
# Checker
# ---------------------------------------------------------------------------


class _Checker:
    """Validates a derivation node by node, children before parents."""

    def __init__(self, strict_zero: bool = False):
        self.strict_zero = strict_zero

    def check(self, d: Derivation, path: tuple[int, ...] = ()) -> Judgment:
        for index, premise in enumerate(d.premises):
            self.check(premise, (*path, index))
        try:
            self._check_rule(d, path)
        except IncompatibleNatures as err:
            raise CheckError(path, CheckFailure.INCOMPATIBLE_SUM, str(err)) from None
        self._check_invariants(d, path)
        return d.conclusion

    def _fail(self, path, reason: CheckFailure, detail: str):
        logger.debug("check failed at %s: %s", list(path), detail)
        raise CheckError(path, reason, detail)

    def _expect_premises(self, d: Derivation, path, count: Optional[int], minimum: int = 0):
        if count is not None and len(d.premises) != count:
            self._fail(path, CheckFailure.RULE_SHAPE, f"{d.rule.value} takes {count} premises, got {len(d.premises)}")
        if len(d.premises) < minimum:
            self._fail(path, CheckFailure.RULE_SHAPE, f"{d.rule.value} takes at least {minimum} premises")

    def _expect_witness(self, d: Derivation, path, kind):
        if kind is None:
            if d.witness is not None:
                self._fail(path, CheckFailure.RULE_SHAPE, f"{d.rule.value} carries no witness")
        elif not isinstance(d.witness, kind):
            self._fail(path, CheckFailure.RULE_SHAPE, f"{d.rule.value} needs a {kind.__name__}")

    def _expect_subject(self, path, ok: bool, d: Derivation):
        if not ok:
            self._fail(path, CheckFailure.RULE_SHAPE, f"subject {print_term(d.subject)} does not fit {d.rule.value}")

    def _expect_conclusion(self, d: Derivation, path, family, typing, counter, result):
        j = d.conclusion
        if j.family != family:
            self._fail(path, CheckFailure.SUM_MISMATCH, f"family context should be {{{format_family_ctx(family)}}}")
        if j.typing != typing:
            self._fail(path, CheckFailure.SUM_MISMATCH, f"typing context should be {{{format_typing_ctx(typing)}}}")
        if j.counter != counter:
            self._fail(path, CheckFailure.COUNTER_MISMATCH, f"counter should be {counter}, got {j.counter}")
        if j.result != result:
            self._fail(path, CheckFailure.RULE_SHAPE, f"result should be {format_multitype(result)}, got {format_multitype(j.result)}")

    def _check_rule(self, d: Derivation, path) -> None:
        handler = getattr(self, "_check_" + d.rule.name.lower())
        handler(d, path)

    def _check_tvar1(self, d, path):
        self._expect_premises(d, path, 0)
        self._expect_witness(d, path, None)
        self._expect_subject(path, isinstance(d.subject, Var), d)
        x = d.subject.name
        self._expect_conclusion(d, path, FamilyContext(), TypingContext({x: d.result}), EMPTY_COUNTER, d.result)

    def _check_tvar2(self, d, path):
        self._expect_premises(d, path, 0)
        self._expect_witness(d, path, None)
        self._expect_subject(path, isinstance(d.subject, Var), d)
        family = FamilyContext({d.subject.name: MultitypeFamily((d.result,))})
        self._expect_conclusion(d, path, family, TypingContext(), EMPTY_COUNTER, d.result)

    def _check_tabs(self, d, path):
        self._expect_witness(d, path, AbsWitness)
        self._expect_subject(path, isinstance(d.subject, Abs), d)
        x, body = d.subject.binder, d.subject.body
        if len(d.witness.binders) != len(d.premises):
            self._fail(path, CheckFailure.RULE_SHAPE, "one binder assumption per premise")
        for index, (assumption, premise) in enumerate(zip(d.witness.binders, d.premises)):
            if not alpha_eq(premise.subject, body):
                self._fail(path, CheckFailure.RULE_SHAPE, f"premise {index} does not type the abstraction body")
            if premise.typing.at(x) != assumption:
                self._fail(path, CheckFailure.RULE_SHAPE, f"premise {index} assumes a different type for {x}")
            if x in premise.family:
                self._fail(path, CheckFailure.RULE_SHAPE, f"premise {index} puts {x} in its family context")
        result = Multitype(Nature.ABS, tuple(Arrow(a, p.result) for a, p in zip(d.witness.binders, d.premises)))
        self._expect_conclusion(
            d,
            path,
            _sum_family(p.family for p in d.premises),
            _sum_typing(p.typing.without(x) for p in d.premises),
            _sum_counters(p.counter for p in d.premises),
            result,
        )

    def _check_tapp(self, d, path):
        self._expect_premises(d, path, 2)
        self._expect_witness(d, path, SubsumptionWitness)
        fun, arg = d.premises
        self._expect_subject(
            path,
            isinstance(d.subject, App) and alpha_eq(d.subject.fun, fun.subject) and alpha_eq(d.subject.arg, arg.subject),
            d,
        )
        arrow = _singleton_arrow(fun.result)
        if arrow is None:
            self._fail(path, CheckFailure.RULE_SHAPE, "function premise must have a single arrow type")
        witness = d.witness
        if witness.assumption != arrow.argument or witness.subsumed != arg.result:
            self._fail(path, CheckFailure.RULE_SHAPE, "subsumption witness does not match the premises")
        if not subsumes(witness.assumption, witness.subsumed):
            self._fail(path, CheckFailure.SUBSUMPTION_FAILURE, "argument type is not subsumed by the arrow domain")
        self._expect_conclusion(
            d,
            path,
            sum_family_ctx(fun.family, arg.family),
            sum_typing_ctx(fun.typing, arg.typing),
            MultiCounter.of(RuleName.B) + fun.counter + arg.counter,
            arrow.result,
        )

    def _check_tzero(self, d, path):
        self._expect_premises(d, path, 0)
        self._expect_witness(d, path, None)
        self._expect_subject(path, isinstance(d.subject, Zero), d)
        if d.result.nature is not Nature.NAT or not all(isinstance(m, ZeroTy) for m in d.result.members):
            self._fail(path, CheckFailure.RULE_SHAPE, "0 is only typed with 0t members")
        if self.strict_zero and len(d.result) > 1:
            self._fail(path, CheckFailure.ZERO_MULTIPLICITY, "at most one 0t member under strict zero typing")
        self._expect_conclusion(d, path, FamilyContext(), TypingContext(), EMPTY_COUNTER, d.result)

    def _check_tsucc(self, d, path):
        self._expect_premises(d, path, 1)
        self._expect_witness(d, path, SplitWitness)
        (inner,) = d.premises
        self._expect_subject(path, isinstance(d.subject, Succ) and alpha_eq(d.subject.inner, inner.subject), d)
        parts = d.witness.parts
        if any(p.nature is not Nature.NAT for p in parts):
            self._fail(path, CheckFailure.RULE_SHAPE, "split parts must be nat multitypes")
        if sum_all(parts, Nature.NAT) != inner.result:
            self._fail(path, CheckFailure.SUM_MISMATCH, "split does not sum to the premise result")
        result = Multitype(Nature.NAT, tuple(SuccTy(p) for p in parts))
        self._expect_conclusion(d, path, inner.family, inner.typing, inner.counter, result)

    def _check_tifzero(self, d, path):
        self._expect_premises(d, path, 2)
        self._expect_witness(d, path, None)
        guard, then_d = d.premises
        self._expect_subject(
            path,
            isinstance(d.subject, IfZ)
            and alpha_eq(d.subject.guard, guard.subject)
            and alpha_eq(d.subject.then_branch, then_d.subject),
            d,
        )
        if guard.result != Multitype(Nature.NAT, (ZeroTy(),)):
            self._fail(path, CheckFailure.RULE_SHAPE, "guard premise must have type [0t]nat")
        self._expect_conclusion(
            d,
            path,
            sum_family_ctx(guard.family, then_d.family),
            sum_typing_ctx(guard.typing, then_d.typing),
            MultiCounter.of(RuleName.I0) + guard.counter + then_d.counter,
            then_d.result,
        )

    def _check_tifsucc(self, d, path):
        self._expect_premises(d, path, 2)
        self._expect_witness(d, path, SubsumptionWitness)
        guard, else_d = d.premises
        self._expect_subject(
            path,
            isinstance(d.subject, IfZ)
            and alpha_eq(d.subject.guard, guard.subject)
            and alpha_eq(d.subject.else_branch, else_d.subject),
            d,
        )
        x = d.subject.binder
        succ = _singleton_succ(guard.result)
        if succ is None:
            self._fail(path, CheckFailure.RULE_SHAPE, "guard premise must have type [succ(N)]nat")
        witness = d.witness
        if witness.subsumed != succ.pred or witness.assumption != else_d.typing.at(x):
            self._fail(path, CheckFailure.RULE_SHAPE, "subsumption witness does not match the premises")
        if x in else_d.family:
            self._fail(path, CheckFailure.RULE_SHAPE, f"else premise puts {x} in its family context")
        if not subsumes(witness.assumption, witness.subsumed):
            self._fail(path, CheckFailure.SUBSUMPTION_FAILURE, f"assumption on {x} is not subsumed by the predecessor type")
        self._expect_conclusion(
            d,
            path,
            sum_family_ctx(guard.family, else_d.family),
            sum_typing_ctx(guard.typing, else_d.typing.without(x)),
            MultiCounter.of(RuleName.IS) + guard.counter + else_d.counter,
            else_d.result,
        )

    def _check_tfix(self, d, path):
        self._expect_premises(d, path, None, minimum=1)
        self._expect_witness(d, path, FamilyWitness)
        head, *recs = d.premises
        self._expect_subject(path, isinstance(d.subject, Fix) and alpha_eq(d.subject.body, head.subject), d)
        x = d.subject.binder
        members = d.witness.members
        if len(members) != len(recs):
            self._fail(path, CheckFailure.RULE_SHAPE, "one recursive premise per family member")
        if head.family.at(x) != MultitypeFamily(members):
            self._fail(path, CheckFailure.RULE_SHAPE, f"body premise assigns {x} a different family")
        if x in head.typing:
            self._fail(path, CheckFailure.RULE_SHAPE, f"body premise puts {x} in its typing context")
        for index, (member, rec) in enumerate(zip(members, recs), start=1):
            if not alpha_eq(rec.subject, d.subject):
                self._fail(path, CheckFailure.RULE_SHAPE, f"premise {index} does not type the fix term")
            if rec.result != member:
                self._fail(path, CheckFailure.RULE_SHAPE, f"premise {index} has the wrong result")
        self._expect_conclusion(
            d,
            path,
            _sum_family([head.family.without(x), *(r.family for r in recs)]),
            _sum_typing([head.typing, *(r.typing for r in recs)]),
            MultiCounter.of(RuleName.F) + head.counter + _sum_counters(r.counter for r in recs),
            head.result,
        )

    def _check_invariants(self, d: Derivation, path) -> None:
        j = d.conclusion
        shared = j.family.domain & j.typing.domain
        if shared:
            self._fail(path, CheckFailure.DISJOINTNESS_VIOLATION, f"variables in both contexts: {sorted(shared)}")
        unused = (j.family.domain | j.typing.domain) - free_vars(j.subject)
        if unused:
            self._fail(path, CheckFailure.RELEVANCE_VIOLATION, f"assumptions on variables not free in the subject: {sorted(unused)}")


def check_derivation(d: Derivation, strict_zero: bool = False) -> Judgment:
    """
    Validate every node of a derivation.

    Args:
        d: The derivation
        strict_zero: Only allow zero or one 0t member in t-zero conclusions

    Returns:
        The conclusion of the root

    Raises:
        CheckError: carrying the premise-index path of the first bad node
    """
    return _Checker(strict_zero).check(d)


def is_tight(d: Derivation) -> bool:
    """Empty contexts and an empty result multitype."""
    j = d.conclusion
    return not j.family and not j.typing and j.result.is_empty


def counter_of(d: Derivation) -> MultiCounter:
    return d.conclusion.counter


def count_rules(d: Derivation) -> MultiCounter:
    """Counter obtained by counting rule nodes in the tree."""
    own = COUNTED_RULES.get(d.rule)
    total = MultiCounter.of(own) if own is not None else EMPTY_COUNTER
    for premise in d.premises:
        total = total + count_rules(premise)
    return total


def derivation_size(d: Derivation) -> int:
    return 1 + sum(derivation_size(p) for p in d.premises)


def format_judgment(j: Judgment) -> str:
    """``family ; typing |-{counter} term : result``, empty contexts shown as ``.``."""
    family = format_family_ctx(j.family) or "."
    typing = format_typing_ctx(j.typing) or "."
    return f"{family} ; {typing} |-{j.counter} {print_term(j.subject)} : {format_multitype(j.result)}"


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def _type_to_json(ty: TypeH, canonical: bool) -> dict[str, Any]:
    match ty:
        case ZeroTy():
            return {"kind": "zero"}
        case SuccTy(pred):
            return {"kind": "succ", "pred": multitype_to_json(pred, canonical)}
        case Arrow(argument, result):
            return {
                "kind": "arrow",
                "argument": opt_to_json(argument, canonical),
                "result": multitype_to_json(result, canonical),
            }
    raise TypeError(f"not a type: {ty!r}")


def multitype_to_json(m: Multitype, canonical: bool = False) -> dict[str, Any]:
    if canonical:
        m = canonicalize(m)
    return {"nature": m.nature.value, "members": [_type_to_json(ty, canonical) for ty in m.members]}


def opt_to_json(m: OptMultitype, canonical: bool = False) -> Union[str, dict[str, Any]]:
    return "bot" if m is None else multitype_to_json(m, canonical)


def _witness_to_json(witness: Witness, canonical: bool) -> dict[str, Any]:
    match witness:
        case AbsWitness(binders):
            return {"binders": [opt_to_json(b, canonical) for b in binders]}
        case SubsumptionWitness(assumption, subsumed):
            return {
                "assumption": opt_to_json(assumption, canonical),
                "subsumed": multitype_to_json(subsumed, canonical),
            }
        case SplitWitness(parts):
            return {"split": [multitype_to_json(p, canonical) for p in parts]}
        case FamilyWitness(members):
            return {"family": [multitype_to_json(m, canonical) for m in members]}
    return {}


def to_json(d: Derivation, canonical: bool = False) -> dict[str, Any]:
    """
    Encode a derivation as plain JSON data.

    With ``canonical`` every multitype is written in canonical member order;
    witness lists keep their order since they are aligned with premises.
    """
    j = d.conclusion
    family = {
        x: [multitype_to_json(m, canonical) for m in j.family[x].members]
        for x in sorted(j.family)
    }
    if canonical:
        family = {x: sorted(ms, key=lambda m: json.dumps(m, sort_keys=True)) for x, ms in family.items()}
    return {
        "rule": d.rule.value,
        "judgment": {
            "family": family,
            "typing": {x: multitype_to_json(j.typing[x], canonical) for x in sorted(j.typing)},
            "counter": j.counter.to_json(),
            "term": print_term(j.subject),
            "type": multitype_to_json(j.result, canonical),
        },
        "witness": _witness_to_json(d.witness, canonical),
        "premises": [to_json(p, canonical) for p in d.premises],
    }


def dumps(d: Derivation, canonical: bool = True) -> str:
    """Serialize a derivation; canonical output has sorted keys and canonical multitypes."""
    return json.dumps(to_json(d, canonical), sort_keys=canonical, indent=2, ensure_ascii=False)


def _field(obj: Any, name: str, kind: type):
    if not isinstance(obj, dict) or name not in obj:
        raise DecodeError(f"missing field {name!r}")
    value = obj[name]
    if not isinstance(value, kind):
        raise DecodeError(f"field {name!r} should be a {kind.__name__}")
    return value


def _type_from_json(obj: Any) -> TypeH:
    kind = _field(obj, "kind", str)
    if kind == "zero":
        return ZeroTy()
    if kind == "succ":
        return SuccTy(multitype_from_json(_field(obj, "pred", dict)))
    if kind == "arrow":
        return Arrow(opt_from_json(obj.get("argument")), multitype_from_json(_field(obj, "result", dict)))
    raise DecodeError(f"unknown type kind {kind!r}")


def multitype_from_json(obj: Any) -> Multitype:
    nature = _field(obj, "nature", str)
    members = _field(obj, "members", list)
    try:
        return Multitype(Nature(nature), tuple(_type_from_json(m) for m in members))
    except (MalformedType, ValueError) as err:
        if isinstance(err, DecodeError):
            raise
        raise DecodeError(str(err)) from None


def opt_from_json(obj: Any) -> OptMultitype:
    if obj == "bot":
        return None
    return multitype_from_json(obj)


def _witness_from_json(rule: Rule, obj: Any) -> Witness:
    if not isinstance(obj, dict):
        raise DecodeError("witness should be an object")
    if rule is Rule.TABS:
        return AbsWitness(tuple(opt_from_json(b) for b in _field(obj, "binders", list)))
    if rule in (Rule.TAPP, Rule.TIFSUCC):
        return SubsumptionWitness(opt_from_json(obj.get("assumption")), multitype_from_json(_field(obj, "subsumed", dict)))
    if rule is Rule.TSUCC:
        return SplitWitness(tuple(multitype_from_json(p) for p in _field(obj, "split", list)))
    if rule is Rule.TFIX:
        return FamilyWitness(tuple(multitype_from_json(m) for m in _field(obj, "family", list)))
    return None


def _counter_from_json(obj: dict) -> MultiCounter:
    for name, count in obj.items():
        if isinstance(count, bool) or not isinstance(count, int) or count < 0:
            raise DecodeError(f"counter entry {name!r} should be a non-negative integer")
    try:
        return MultiCounter.from_json(obj)
    except ValueError as err:
        raise DecodeError(f"bad judgment: {err}") from None


def _family_from_json(obj: dict) -> FamilyContext:
    entries = {}
    for x, members in obj.items():
        if not isinstance(members, list):
            raise DecodeError(f"family of {x!r} should be a list")
        entries[x] = MultitypeFamily(tuple(multitype_from_json(m) for m in members))
    return FamilyContext(entries)


def from_json(obj: Any) -> Derivation:
    """
    Decode a derivation without checking it.

    Raises:
        DecodeError: when the data does not have the derivation shape
    """
    try:
        rule = Rule(_field(obj, "rule", str))
    except ValueError as err:
        if isinstance(err, DecodeError):
            raise
        raise DecodeError(str(err)) from None
    j = _field(obj, "judgment", dict)
    try:
        subject = parse_term(_field(j, "term", str))
    except ParseError as err:
        raise DecodeError(f"bad judgment: {err}") from None
    counter = _counter_from_json(_field(j, "counter", dict))
    family = _family_from_json(_field(j, "family", dict))
    typing = TypingContext({x: opt_from_json(m) for x, m in _field(j, "typing", dict).items()})
    judgment = Judgment(family, typing, counter, subject, multitype_from_json(_field(j, "type", dict)))
    premises = tuple(from_json(p) for p in _field(obj, "premises", list))
    return Derivation(rule, judgment, premises, _witness_from_json(rule, obj.get("witness", {})))


def loads(text: str) -> Derivation:
    try:
        return from_json(json.loads(text))
    except json.JSONDecodeError as err:
        raise DecodeError(f"invalid JSON: {err}") from None
