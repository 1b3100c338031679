"""
PCF_H Abstract Syntax
=====================

Terms of the hybrid calculus with alpha-equivalence and capture-avoiding
substitution. Terms are immutable and keep their binder names; a nameless
key is used only to compare terms up to renaming of bound variables.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Union


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Abs:
    binder: str
    body: "Term"


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Succ:
    inner: "Term"


@dataclass(frozen=True)
class IfZ:
    """``ifz(guard; then_branch; binder. else_branch)``; binder scopes over else_branch only."""

    guard: "Term"
    then_branch: "Term"
    binder: str
    else_branch: "Term"


@dataclass(frozen=True)
class Fix:
    binder: str
    body: "Term"


Term = Union[Var, Abs, App, Zero, Succ, IfZ, Fix]


@dataclass(frozen=True)
class VAbs:
    binder: str
    body: Term


@dataclass(frozen=True)
class VNat:
    count: int


ValueView = Union[VAbs, VNat]


_TRAILING_DIGITS = re.compile(r"[0-9']+$")


def free_vars(t: Term) -> frozenset[str]:
    """Return the free variables of a term."""
    match t:
        case Var(name):
            return frozenset((name,))
        case Abs(binder, body) | Fix(binder, body):
            return free_vars(body) - {binder}
        case App(fun, arg):
            return free_vars(fun) | free_vars(arg)
        case Zero():
            return frozenset()
        case Succ(inner):
            return free_vars(inner)
        case IfZ(guard, then_branch, binder, else_branch):
            return (
                free_vars(guard)
                | free_vars(then_branch)
                | (free_vars(else_branch) - {binder})
            )
    raise TypeError(f"not a term: {t!r}")


def all_names(t: Term) -> frozenset[str]:
    """Return every variable name occurring in a term, free or binding."""
    match t:
        case Var(name):
            return frozenset((name,))
        case Abs(binder, body) | Fix(binder, body):
            return all_names(body) | {binder}
        case App(fun, arg):
            return all_names(fun) | all_names(arg)
        case Zero():
            return frozenset()
        case Succ(inner):
            return all_names(inner)
        case IfZ(guard, then_branch, binder, else_branch):
            return all_names(guard) | all_names(then_branch) | all_names(else_branch) | {binder}
    raise TypeError(f"not a term: {t!r}")


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """
    Pick a name derived from ``base`` that does not occur in ``avoid``.

    Trailing digits and primes are stripped from ``base`` and the smallest
    numeric suffix that is not taken is appended: ``y`` becomes ``y1``,
    ``y1`` becomes ``y2`` when ``y1`` is taken.
    """
    taken = set(avoid)
    stem = _TRAILING_DIGITS.sub("", base) or "v"
    for index in itertools.count(1):
        candidate = f"{stem}{index}"
        if candidate not in taken:
            return candidate
    raise AssertionError("unreachable")


def subst(t: Term, x: str, s: Term) -> Term:
    """
    Capture-avoiding substitution ``t{x:=s}``.

    Args:
        t: Term to substitute into
        x: Variable whose free occurrences are replaced
        s: Replacement, any term (fix unfolding substitutes non-values)

    Returns:
        The substituted term; ``t`` itself when ``x`` is not free in it.
    """
    if x not in free_vars(t):
        return t
    return _subst(t, x, s, free_vars(s))


def _subst(t: Term, x: str, s: Term, fv_s: frozenset[str]) -> Term:
    if x not in free_vars(t):
        return t
    match t:
        case Var():
            return s
        case Abs(binder, body):
            binder, body = _open_binder(binder, body, x, s, fv_s)
            return Abs(binder, _subst(body, x, s, fv_s))
        case Fix(binder, body):
            binder, body = _open_binder(binder, body, x, s, fv_s)
            return Fix(binder, _subst(body, x, s, fv_s))
        case App(fun, arg):
            return App(_subst(fun, x, s, fv_s), _subst(arg, x, s, fv_s))
        case Succ(inner):
            return Succ(_subst(inner, x, s, fv_s))
        case IfZ(guard, then_branch, binder, else_branch):
            guard = _subst(guard, x, s, fv_s)
            then_branch = _subst(then_branch, x, s, fv_s)
            if x in free_vars(else_branch) and binder != x:
                binder, else_branch = _open_binder(binder, else_branch, x, s, fv_s)
                else_branch = _subst(else_branch, x, s, fv_s)
            return IfZ(guard, then_branch, binder, else_branch)
    raise TypeError(f"not a term: {t!r}")


def _open_binder(
    binder: str, body: Term, x: str, s: Term, fv_s: frozenset[str]
) -> tuple[str, Term]:
    """Rename ``binder`` away from the free variables of ``s`` when needed."""
    if binder not in fv_s:
        return binder, body
    renamed = fresh_name(binder, fv_s | all_names(body) | {x})
    return renamed, subst(body, binder, Var(renamed))


def nameless(t: Term, scope: tuple[str, ...] = ()) -> tuple:
    """
    Hashable key of a term up to alpha-equivalence.

    Bound occurrences become indices into the enclosing binders (innermost
    first); free occurrences keep their names.
    """
    match t:
        case Var(name):
            if name in scope:
                return ("bound", scope.index(name))
            return ("free", name)
        case Abs(binder, body):
            return ("abs", nameless(body, (binder, *scope)))
        case Fix(binder, body):
            return ("fix", nameless(body, (binder, *scope)))
        case App(fun, arg):
            return ("app", nameless(fun, scope), nameless(arg, scope))
        case Zero():
            return ("zero",)
        case Succ(inner):
            return ("succ", nameless(inner, scope))
        case IfZ(guard, then_branch, binder, else_branch):
            return (
                "ifz",
                nameless(guard, scope),
                nameless(then_branch, scope),
                nameless(else_branch, (binder, *scope)),
            )
    raise TypeError(f"not a term: {t!r}")


def alpha_eq(t: Term, u: Term) -> bool:
    """True iff the two terms differ only in the names of bound variables."""
    return t == u or nameless(t) == nameless(u)


def numeral(count: int) -> Term:
    """Build the natural value ``S^count(0)``."""
    if count < 0:
        raise ValueError(f"numerals are non-negative, got {count}")
    t: Term = Zero()
    for _ in range(count):
        t = Succ(t)
    return t


def nat_value(t: Term) -> Optional[int]:
    """Return ``k`` when ``t`` is literally ``S^k(0)``, else None."""
    count = 0
    while isinstance(t, Succ):
        t = t.inner
        count += 1
    return count if isinstance(t, Zero) else None


def value_view(t: Term) -> Optional[ValueView]:
    """Project a term onto the value grammar (abstractions and natural values)."""
    if isinstance(t, Abs):
        return VAbs(t.binder, t.body)
    count = nat_value(t)
    if count is not None:
        return VNat(count)
    return None


def is_value(t: Term) -> bool:
    return value_view(t) is not None


def term_size(t: Term) -> int:
    """Number of constructors in a term."""
    match t:
        case Var() | Zero():
            return 1
        case Abs(_, body) | Fix(_, body):
            return 1 + term_size(body)
        case App(fun, arg):
            return 1 + term_size(fun) + term_size(arg)
        case Succ(inner):
            return 1 + term_size(inner)
        case IfZ(guard, then_branch, _, else_branch):
            return 1 + term_size(guard) + term_size(then_branch) + term_size(else_branch)
    raise TypeError(f"not a term: {t!r}")
