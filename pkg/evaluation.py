"""
PCF_H Evaluation
================

The indexed one-step reduction relation, deterministic evaluation with a
fuel bound, classification of normal forms by nature, and the diamond
checker used by the confluence tests.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, NamedTuple, Optional

from reader import print_term
from syntax import (
    Abs,
    App,
    Fix,
    IfZ,
    Succ,
    Term,
    Zero,
    alpha_eq,
    free_vars,
    is_value,
    nameless,
    nat_value,
    subst,
)


logger = logging.getLogger(__name__)


class RuleName(str, Enum):
    """Names indexing reduction steps: beta, ifz-zero, ifz-successor, fix unfolding."""

    B = "B"
    I0 = "I0"
    IS = "IS"
    F = "F"


RULE_ORDER = (RuleName.B, RuleName.I0, RuleName.IS, RuleName.F)


@dataclass(frozen=True)
class MultiCounter:
    """
    Multiset over rule names, stored as four counts in ``RULE_ORDER``.

    ``len`` is the cardinality of the multiset.
    """

    counts: tuple[int, int, int, int] = (0, 0, 0, 0)

    def __post_init__(self):
        if len(self.counts) != 4 or any(c < 0 for c in self.counts):
            raise ValueError(f"invalid multi-counter counts: {self.counts}")

    @classmethod
    def of(cls, *rules: RuleName) -> "MultiCounter":
        return cls.from_rules(rules)

    @classmethod
    def from_rules(cls, rules: Iterable[RuleName]) -> "MultiCounter":
        counts = [0, 0, 0, 0]
        for rule in rules:
            counts[RULE_ORDER.index(RuleName(rule))] += 1
        return cls(tuple(counts))

    def __getitem__(self, rule: RuleName) -> int:
        return self.counts[RULE_ORDER.index(RuleName(rule))]

    def __add__(self, other: "MultiCounter") -> "MultiCounter":
        return MultiCounter(tuple(a + b for a, b in zip(self.counts, other.counts)))

    def __len__(self) -> int:
        return sum(self.counts)

    def remove(self, rule: RuleName) -> "MultiCounter":
        """Return the counter with one occurrence of ``rule`` taken out."""
        index = RULE_ORDER.index(RuleName(rule))
        if self.counts[index] == 0:
            raise ValueError(f"rule {rule.value} does not occur in {self}")
        counts = list(self.counts)
        counts[index] -= 1
        return MultiCounter(tuple(counts))

    def to_json(self) -> dict[str, int]:
        return {rule.value: count for rule, count in zip(RULE_ORDER, self.counts)}

    @classmethod
    def from_json(cls, data: dict[str, int]) -> "MultiCounter":
        unknown = set(data) - {rule.value for rule in RULE_ORDER}
        if unknown:
            raise ValueError(f"unknown rule names in counter: {sorted(unknown)}")
        return cls(tuple(int(data.get(rule.value, 0)) for rule in RULE_ORDER))

    def __str__(self) -> str:
        inner = ", ".join(f"{rule.value}:{count}" for rule, count in zip(RULE_ORDER, self.counts))
        return "{" + inner + "}"


EMPTY_COUNTER = MultiCounter()


class Nature(str, Enum):
    """Natures of normal forms; ``stuck`` is the only improper one."""

    ABS = "abs"
    NAT = "nat"
    STUCK = "stuck"

    @property
    def is_proper(self) -> bool:
        return self is not Nature.STUCK


class Position(str, Enum):
    """Congruence positions a redex can sit under."""

    FUN = "fun"
    ARG = "arg"
    INNER = "inner"
    GUARD = "guard"


Path = tuple[Position, ...]


class Strategy(str, Enum):
    """Priority between the two sides of an application in ``step_det``."""

    LEFT = "left"
    RIGHT = "right"


class Step(NamedTuple):
    rule: RuleName
    term: Term
    path: Path = ()


class OpenTermError(ValueError):
    """Raised when an operation that needs a closed term receives an open one."""

    def __init__(self, term: Term):
        names = ", ".join(sorted(free_vars(term)))
        super().__init__(f"term has free variables: {names}")
        self.term = term


def _require_closed(t: Term) -> None:
    if free_vars(t):
        raise OpenTermError(t)


def root_step(t: Term) -> Optional[tuple[RuleName, Term]]:
    """Fire the redex at the root of ``t``, if there is one."""
    match t:
        case App(Abs(binder, body), arg) if is_value(arg):
            return RuleName.B, subst(body, binder, arg)
        case IfZ(Zero(), then_branch, _, _):
            return RuleName.I0, then_branch
        case IfZ(Succ(pred), _, binder, else_branch) if nat_value(pred) is not None:
            return RuleName.IS, subst(else_branch, binder, pred)
        case Fix(binder, body):
            return RuleName.F, subst(body, binder, t)
    return None


def subterm_at(t: Term, path: Path) -> Term:
    """Return the subterm of ``t`` at a congruence position."""
    for label in path:
        match (Position(label), t):
            case (Position.FUN, App(fun, _)):
                t = fun
            case (Position.ARG, App(_, arg)):
                t = arg
            case (Position.INNER, Succ(inner)):
                t = inner
            case (Position.GUARD, IfZ(guard, _, _, _)):
                t = guard
            case _:
                raise ValueError(f"position {label} does not exist in {print_term(t)}")
    return t


def _plug(t: Term, label: Position, new: Term) -> Term:
    match (label, t):
        case (Position.FUN, App(_, arg)):
            return App(new, arg)
        case (Position.ARG, App(fun, _)):
            return App(fun, new)
        case (Position.INNER, Succ(_)):
            return Succ(new)
        case (Position.GUARD, IfZ(_, then_branch, binder, else_branch)):
            return IfZ(new, then_branch, binder, else_branch)
    raise ValueError(f"position {label} does not exist in {print_term(t)}")


def replace_at(t: Term, path: Path, new: Term) -> Term:
    """Replace the subterm at ``path``."""
    if not path:
        return new
    head, rest = Position(path[0]), path[1:]
    return _plug(t, head, replace_at(subterm_at(t, (head,)), rest, new))


def reduce_at(t: Term, path: Path) -> Optional[Step]:
    """
    Fire the redex sitting at ``path`` in ``t``.

    Returns:
        The step, or None when the subterm at ``path`` is not a redex.
    """
    fired = root_step(subterm_at(t, path))
    if fired is None:
        return None
    rule, reduct = fired
    return Step(rule, replace_at(t, path, reduct), tuple(Position(p) for p in path))


def _lift(label: Position, t: Term, inner: Step) -> Step:
    return Step(inner.rule, _plug(t, label, inner.term), (label, *inner.path))


def step_all(t: Term) -> list[Step]:
    """
    Every one-step reduct of ``t``.

    Root redexes come first; then reducts inside the guard of an ``ifz``,
    under ``S``, and on either side of an application. Nothing reduces under
    an abstraction or inside ``ifz`` branches.
    """
    steps: list[Step] = []
    fired = root_step(t)
    if fired is not None:
        steps.append(Step(fired[0], fired[1], ()))
    match t:
        case App(fun, arg):
            steps.extend(_lift(Position.FUN, t, s) for s in step_all(fun))
            steps.extend(_lift(Position.ARG, t, s) for s in step_all(arg))
        case Succ(inner):
            steps.extend(_lift(Position.INNER, t, s) for s in step_all(inner))
        case IfZ(guard, _, _, _):
            steps.extend(_lift(Position.GUARD, t, s) for s in step_all(guard))
    return steps


def step_det(t: Term, strategy: Strategy = Strategy.LEFT) -> Optional[Step]:
    """
    The deterministic step: root, then ifz guard, then under S, then the
    application sides in the order given by ``strategy``.
    """
    fired = root_step(t)
    if fired is not None:
        return Step(fired[0], fired[1], ())
    match t:
        case IfZ(guard, _, _, _):
            inner = step_det(guard, strategy)
            return None if inner is None else _lift(Position.GUARD, t, inner)
        case Succ(inner_term):
            inner = step_det(inner_term, strategy)
            return None if inner is None else _lift(Position.INNER, t, inner)
        case App(fun, arg):
            sides = [(Position.FUN, fun), (Position.ARG, arg)]
            if Strategy(strategy) is Strategy.RIGHT:
                sides.reverse()
            for label, sub in sides:
                inner = step_det(sub, strategy)
                if inner is not None:
                    return _lift(label, t, inner)
    return None


def classify_nf(t: Term) -> Optional[Nature]:
    """
    Nature of ``t`` when it is a normal form, None otherwise.

    Variables and fixed points have no nature. An application is stuck when
    its head is a non-abstraction normal form, or when an abstraction is
    applied to a stuck normal form.
    """
    match t:
        case Abs():
            return Nature.ABS
        case Zero():
            return Nature.NAT
        case Succ(inner):
            nature = classify_nf(inner)
            if nature is None:
                return None
            return Nature.NAT if nature is Nature.NAT else Nature.STUCK
        case App(fun, arg):
            head, argument = classify_nf(fun), classify_nf(arg)
            if head is None or argument is None:
                return None
            if head is not Nature.ABS or argument is Nature.STUCK:
                return Nature.STUCK
            return None
        case IfZ(guard, _, _, _):
            nature = classify_nf(guard)
            if nature is None or nature is Nature.NAT:
                return None
            return Nature.STUCK
    return None


@dataclass(frozen=True)
class Trace:
    """
    A reduction sequence from ``initial``.

    ``nature`` is the nature of the last term when it is a normal form and
    None when the fuel ran out first.
    """

    initial: Term
    steps: tuple[Step, ...]
    nature: Optional[Nature]

    @property
    def exhausted(self) -> bool:
        return self.nature is None

    @property
    def terms(self) -> tuple[Term, ...]:
        return (self.initial, *(step.term for step in self.steps))

    @property
    def final(self) -> Term:
        return self.steps[-1].term if self.steps else self.initial

    @property
    def rules(self) -> tuple[RuleName, ...]:
        return tuple(step.rule for step in self.steps)

    @property
    def counter(self) -> MultiCounter:
        return MultiCounter.from_rules(self.rules)

    def __len__(self) -> int:
        return len(self.steps)


def evaluate(t: Term, fuel: int, strategy: Strategy = Strategy.LEFT) -> Trace:
    """
    Iterate ``step_det`` at most ``fuel`` times.

    Args:
        t: Closed term
        fuel: Maximum number of steps; with 0 only a normal form avoids exhaustion
        strategy: Application side explored first

    Returns:
        The trace, ending in a normal form or with the fuel exhausted

    Raises:
        OpenTermError: when ``t`` has free variables
    """
    _require_closed(t)
    steps: list[Step] = []
    current = t
    for _ in range(fuel):
        step = step_det(current, strategy)
        if step is None:
            break
        logger.debug("%s : %s", step.rule.value, print_term(step.term))
        steps.append(step)
        current = step.term

    if step_det(current, strategy) is not None:
        logger.debug("fuel exhausted after %d steps", len(steps))
        return Trace(t, tuple(steps), None)

    nature = classify_nf(current)
    if nature is None:
        raise AssertionError(f"irreducible closed term without a nature: {print_term(current)}")
    return Trace(t, tuple(steps), nature)


@dataclass(frozen=True)
class DiamondPair:
    """Two distinct reducts of the same term and, when found, their common reduct."""

    left: Step
    right: Step
    join: Optional[Term]

    @property
    def joined(self) -> bool:
        return self.join is not None


@dataclass(frozen=True)
class DiamondReport:
    term: Term
    pairs: tuple[DiamondPair, ...]

    @property
    def ok(self) -> bool:
        return all(pair.joined for pair in self.pairs)

    @property
    def counterexamples(self) -> tuple[DiamondPair, ...]:
        return tuple(pair for pair in self.pairs if not pair.joined)


def _find_join(left: Step, right: Step) -> Optional[Term]:
    for first in step_all(left.term):
        if first.rule is not right.rule:
            continue
        for second in step_all(right.term):
            if second.rule is left.rule and alpha_eq(first.term, second.term):
                return first.term
    return None


def diamond_check(t: Term) -> DiamondReport:
    """
    Close every pair of alpha-distinct one-step reducts of ``t``.

    For reducts ``t ->r1 t1`` and ``t ->r2 t2`` a join is a term reached by
    ``t1 ->r2`` and by ``t2 ->r1``.

    Raises:
        OpenTermError: when ``t`` has free variables
    """
    _require_closed(t)
    reducts = step_all(t)
    pairs = []
    for i, left in enumerate(reducts):
        for right in reducts[i + 1:]:
            if alpha_eq(left.term, right.term):
                continue
            pairs.append(DiamondPair(left, right, _find_join(left, right)))
    return DiamondReport(t, tuple(pairs))


class Profile(NamedTuple):
    """Outcome of one maximal reduction sequence: its length, rules and normal form key."""

    length: int
    counter: MultiCounter
    normal_form: Optional[tuple]


def reduction_profiles(t: Term, fuel: int) -> frozenset[Profile]:
    """
    Explore every reduction sequence of ``t`` of at most ``fuel`` steps.

    Sequences that do not reach a normal form within the fuel show up with
    ``normal_form`` set to None. Intended for small terms only.
    """
    _require_closed(t)
    memo: dict[tuple, frozenset[Profile]] = {}

    def explore(term: Term, remaining: int) -> frozenset[Profile]:
        key = (nameless(term), remaining)
        if key in memo:
            return memo[key]
        reducts = step_all(term)
        if not reducts:
            result = frozenset({Profile(0, EMPTY_COUNTER, nameless(term))})
        elif remaining == 0:
            result = frozenset({Profile(0, EMPTY_COUNTER, None)})
        else:
            result = frozenset(
                Profile(p.length + 1, p.counter + MultiCounter.of(step.rule), p.normal_form)
                for step in reducts
                for p in explore(step.term, remaining - 1)
            )
        memo[key] = result
        return result

    return explore(t, fuel)


def trace_lines(trace: Trace) -> list[str]:
    """One ``rule : term`` line per step."""
    return [f"{step.rule.value} : {print_term(step.term)}" for step in trace.steps]


def render_trace(trace: Trace) -> str:
    """The step lines followed by the counter."""
    return "\n".join([*trace_lines(trace), str(trace.counter)])
