"""
Tight Synthesis
===============

Evaluates a closed term, types its normal form tightly and replays
subject expansion back to the start, giving a tight derivation whose
counter is exactly the rules fired by evaluation. Also checks the upper
bound that any derivation's counter gives on evaluation length.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional

from derivation import Derivation, check_derivation, is_tight
from evaluation import (
    MultiCounter,
    Nature,
    OpenTermError,
    Strategy,
    Trace,
    evaluate,
)
from reader import print_term
from syntax import Term, free_vars
from transform import expand_along, nf_tight_deriv


logger = logging.getLogger(__name__)

DEFAULT_FUEL = 10_000


class SynthError(Exception):
    """Base class for terms that cannot be given a tight derivation."""


class StuckNormalForm(SynthError):
    def __init__(self, trace: Trace):
        super().__init__(f"evaluation ends in the stuck normal form {print_term(trace.final)}")
        self.trace = trace


class FuelExhausted(SynthError):
    def __init__(self, trace: Trace):
        super().__init__(f"no normal form within {len(trace)} steps")
        self.trace = trace


class OpenSubject(SynthError):
    def __init__(self, term: Term):
        names = ", ".join(sorted(free_vars(term)))
        super().__init__(f"term has free variables: {names}")
        self.term = term


class SynthResult(NamedTuple):
    derivation: Derivation
    trace: Trace


@dataclass(frozen=True)
class BoundReport:
    """Outcome of running a typed term against its counter."""

    bound: MultiCounter
    steps: MultiCounter
    nature: Optional[Nature]
    tight: bool

    @property
    def holds(self) -> bool:
        if self.nature not in (Nature.ABS, Nature.NAT):
            return False
        if len(self.steps) > len(self.bound):
            return False
        if self.tight:
            return self.steps == self.bound
        return True

    def __str__(self) -> str:
        relation = "=" if self.steps == self.bound else "<="
        return f"{len(self.steps)} steps {relation} |{self.bound}| = {len(self.bound)}"


class BoundViolated(Exception):
    """A checked derivation's counter does not bound evaluation of its subject."""

    def __init__(self, report: BoundReport):
        super().__init__(f"bound violated: {report}")
        self.report = report


def _run(t: Term, fuel: int, strategy: Strategy) -> Trace:
    try:
        return evaluate(t, fuel, strategy)
    except OpenTermError:
        raise OpenSubject(t) from None


def synthesize_tight(
    t: Term,
    fuel: int = DEFAULT_FUEL,
    strategy: Strategy = Strategy.LEFT,
    check_steps: bool = False,
) -> SynthResult:
    """
    Build the tight derivation of a closed, normalizing term.

    Args:
        t: Closed term
        fuel: Maximum number of evaluation steps
        strategy: Application order used by evaluation
        check_steps: Run the checker on every intermediate derivation

    Returns:
        The derivation and the trace it was replayed along

    Raises:
        OpenSubject: when ``t`` has free variables
        StuckNormalForm: when evaluation ends in a stuck normal form
        FuelExhausted: when no normal form is reached within ``fuel``
    """
    trace = _run(t, fuel, strategy)
    if trace.exhausted:
        raise FuelExhausted(trace)
    if trace.nature is Nature.STUCK:
        raise StuckNormalForm(trace)

    logger.debug("normal form %s after %d steps", print_term(trace.final), len(trace))
    derivation = expand_along(
        nf_tight_deriv(trace.final),
        trace,
        require_tight=True,
        check=check_derivation if check_steps else None,
    )
    return SynthResult(derivation, trace)


def verify_upper_bound(d: Derivation, fuel: Optional[int] = None) -> BoundReport:
    """
    Check a derivation and evaluate its subject against its counter.

    Evaluation gets one step more than the counter's size, so a term that
    overruns its bound is caught rather than cut off.

    Raises:
        CheckError: when ``d`` does not check
        OpenSubject: when the subject is open
        FuelExhausted: when ``fuel`` runs out before the bound is reached
        BoundViolated: when evaluation overruns the counter or ends stuck
    """
    check_derivation(d)
    bound = d.counter
    budget = len(bound) + 1 if fuel is None else min(fuel, len(bound) + 1)
    trace = _run(d.subject, budget, Strategy.LEFT)
    if trace.exhausted and budget <= len(bound):
        raise FuelExhausted(trace)
    report = BoundReport(bound, trace.counter, trace.nature, is_tight(d))
    logger.debug("upper bound: %s", report)
    if trace.exhausted or not report.holds:
        raise BoundViolated(report)
    return report


def predict_steps(
    t: Term, fuel: int = DEFAULT_FUEL, strategy: Strategy = Strategy.LEFT
) -> MultiCounter:
    """The counter of the tight derivation of ``t``."""
    return synthesize_tight(t, fuel, strategy).derivation.counter


def counter_summary(counter: MultiCounter) -> str:
    """``6 steps {B:2, I0:1, IS:1, F:2}``."""
    return f"{len(counter)} steps {counter}"

