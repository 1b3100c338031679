"""
Multitypes
==========

The type grammar of the quantitative system: nature-tagged multisets of
types, optional multitypes (``None`` stands for bottom), multitype families
and the two kinds of variable contexts, together with their sums and the
textual type syntax used in diagnostics and tests.

Multiset equality is decided on a canonical key; members keep the order
they were built in so derivation witnesses stay readable.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional, Union

from lark import Lark, Transformer
from lark.exceptions import UnexpectedInput, VisitError

from evaluation import Nature
from reader import ParseError, SourceSpan, to_parse_error


PROPER_NATURES = (Nature.ABS, Nature.NAT)
_NATURE_RANK = {Nature.ABS: 0, Nature.NAT: 1}


class IncompatibleNatures(ValueError):
    """Raised when summing multitypes of different natures."""

    def __init__(self, left, right, variable: Optional[str] = None):
        where = f" for variable {variable}" if variable is not None else ""
        super().__init__(
            f"cannot sum {format_opt(left)} and {format_opt(right)}{where}: natures differ"
        )
        self.variable = variable


class MalformedType(ValueError):
    """Raised when a multitype member does not fit the multitype's nature."""


@dataclass(frozen=True)
class ZeroTy:
    pass


@dataclass(frozen=True)
class SuccTy:
    pred: "Multitype"

    def __post_init__(self):
        if self.pred.nature is not Nature.NAT:
            raise MalformedType(f"succ expects a nat multitype, got {format_multitype(self.pred)}")


@dataclass(frozen=True)
class Arrow:
    argument: Optional["Multitype"]
    result: "Multitype"


TypeH = Union[ZeroTy, SuccTy, Arrow]


def type_key(ty: TypeH) -> tuple:
    """Structural sort key: zero before succ before arrow, then recursively."""
    match ty:
        case ZeroTy():
            return (0,)
        case SuccTy(pred):
            return (1, pred.key)
        case Arrow(argument, result):
            return (2, opt_key(argument), result.key)
    raise TypeError(f"not a type: {ty!r}")


def opt_key(opt: Optional["Multitype"]) -> tuple:
    return (0,) if opt is None else (1, opt.key)


@dataclass(frozen=True, eq=False)
class Multitype:
    """A multiset of types decorated with a proper nature."""

    nature: Nature
    members: tuple[TypeH, ...] = ()

    def __post_init__(self):
        nature = Nature(self.nature)
        object.__setattr__(self, "nature", nature)
        object.__setattr__(self, "members", tuple(self.members))
        if nature not in PROPER_NATURES:
            raise MalformedType(f"multitypes carry a proper nature, got {nature.value}")
        allowed = (Arrow,) if nature is Nature.ABS else (ZeroTy, SuccTy)
        for member in self.members:
            if not isinstance(member, allowed):
                raise MalformedType(f"{format_type(member)} cannot belong to a {nature.value} multitype")

    @cached_property
    def key(self) -> tuple:
        return (_NATURE_RANK[self.nature], tuple(sorted(type_key(m) for m in self.members)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multitype):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[TypeH]:
        return iter(self.members)

    @property
    def is_empty(self) -> bool:
        return not self.members

    def __repr__(self) -> str:
        return f"Multitype({format_multitype(self)})"


OptMultitype = Optional[Multitype]


def empty(nature: Nature) -> Multitype:
    return Multitype(Nature(nature))


def nat_multitype(*members: TypeH) -> Multitype:
    return Multitype(Nature.NAT, members)


def abs_multitype(*members: TypeH) -> Multitype:
    return Multitype(Nature.ABS, members)


@dataclass(frozen=True, eq=False)
class MultitypeFamily:
    """A multiset of multitypes, natures may differ between members."""

    members: tuple[Multitype, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))

    @cached_property
    def key(self) -> tuple:
        return tuple(sorted(m.key for m in self.members))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultitypeFamily):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __add__(self, other: "MultitypeFamily") -> "MultitypeFamily":
        return MultitypeFamily(self.members + other.members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Multitype]:
        return iter(self.members)

    def __repr__(self) -> str:
        return f"MultitypeFamily({format_family(self)})"


class TypingContext(Mapping):
    """
    Assumptions for value-bound variables.

    Variables outside the domain are implicitly assigned bottom, so entries
    given as None are dropped.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Optional[Mapping[str, OptMultitype]] = None):
        self._entries = {x: m for x, m in dict(entries or {}).items() if m is not None}

    def __getitem__(self, x: str) -> Multitype:
        return self._entries[x]

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __hash__(self) -> int:
        return hash(frozenset(self._entries.items()))

    def at(self, x: str) -> OptMultitype:
        return self._entries.get(x)

    def without(self, x: str) -> "TypingContext":
        return TypingContext({y: m for y, m in self._entries.items() if y != x})

    def renamed(self, old: str, new: str) -> "TypingContext":
        return TypingContext({(new if y == old else y): m for y, m in self._entries.items()})

    @property
    def domain(self) -> frozenset[str]:
        return frozenset(self._entries)

    def __repr__(self) -> str:
        return f"TypingContext({format_typing_ctx(self)})"


class FamilyContext(Mapping):
    """Assumptions for fix-bound variables; variables outside the domain map to the empty family."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Optional[Mapping[str, MultitypeFamily]] = None):
        self._entries = {x: f for x, f in dict(entries or {}).items() if len(f) > 0}

    def __getitem__(self, x: str) -> MultitypeFamily:
        return self._entries[x]

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __hash__(self) -> int:
        return hash(frozenset(self._entries.items()))

    def at(self, x: str) -> MultitypeFamily:
        return self._entries.get(x, MultitypeFamily())

    def without(self, x: str) -> "FamilyContext":
        return FamilyContext({y: f for y, f in self._entries.items() if y != x})

    def renamed(self, old: str, new: str) -> "FamilyContext":
        return FamilyContext({(new if y == old else y): f for y, f in self._entries.items()})

    @property
    def domain(self) -> frozenset[str]:
        return frozenset(self._entries)

    def __repr__(self) -> str:
        return f"FamilyContext({format_family_ctx(self)})"


def compatible(a: OptMultitype, b: OptMultitype) -> bool:
    """True iff either side is bottom or both share a nature."""
    return a is None or b is None or a.nature is b.nature


def sum_multitype(a: Multitype, b: Multitype) -> Multitype:
    """Multiset union of two multitypes of the same nature."""
    if a.nature is not b.nature:
        raise IncompatibleNatures(a, b)
    return Multitype(a.nature, a.members + b.members)


def sum_opt(a: OptMultitype, b: OptMultitype) -> OptMultitype:
    """Sum of optional multitypes; bottom is neutral."""
    if a is None:
        return b
    if b is None:
        return a
    return sum_multitype(a, b)


def sum_all(multitypes: Iterable[Multitype], nature: Nature) -> Multitype:
    """Sum of a sequence of multitypes, ``[]`` of ``nature`` when empty."""
    total = empty(nature)
    for m in multitypes:
        total = sum_multitype(total, m)
    return total


def subsumes(a: OptMultitype, target: Multitype) -> bool:
    """Bottom is subsumed by the empty multitypes of both natures; otherwise equality."""
    if a is None:
        return target.is_empty
    return a == target


def sum_typing_ctx(a: TypingContext, b: TypingContext) -> TypingContext:
    """Pointwise sum of typing contexts."""
    entries = dict(a.items())
    for x, m in b.items():
        if x in entries:
            if not compatible(entries[x], m):
                raise IncompatibleNatures(entries[x], m, variable=x)
            entries[x] = sum_multitype(entries[x], m)
        else:
            entries[x] = m
    return TypingContext(entries)


def sum_family_ctx(a: FamilyContext, b: FamilyContext) -> FamilyContext:
    """Pointwise sum of family contexts."""
    entries = dict(a.items())
    for x, family in b.items():
        entries[x] = entries.get(x, MultitypeFamily()) + family
    return FamilyContext(entries)


def canonicalize_type(ty: TypeH) -> TypeH:
    match ty:
        case ZeroTy():
            return ty
        case SuccTy(pred):
            return SuccTy(canonicalize(pred))
        case Arrow(argument, result):
            return Arrow(None if argument is None else canonicalize(argument), canonicalize(result))
    raise TypeError(f"not a type: {ty!r}")


def canonicalize(m: Multitype) -> Multitype:
    """Sort members, recursively, by the structural order."""
    members = sorted((canonicalize_type(ty) for ty in m.members), key=type_key)
    return Multitype(m.nature, tuple(members))


def canonicalize_opt(m: OptMultitype) -> OptMultitype:
    return None if m is None else canonicalize(m)


def splits(m: Multitype) -> Iterator[tuple[Multitype, Multitype]]:
    """Every way to write ``m`` as a sum of two multitypes, up to multiset equality."""
    seen = set()
    indices = range(len(m.members))
    for size in range(len(m.members) + 1):
        for chosen in itertools.combinations(indices, size):
            left = Multitype(m.nature, tuple(m.members[i] for i in chosen))
            right = Multitype(m.nature, tuple(m.members[i] for i in indices if i not in chosen))
            if (left.key, right.key) in seen:
                continue
            seen.add((left.key, right.key))
            yield left, right


def format_type(ty: TypeH) -> str:
    match ty:
        case ZeroTy():
            return "0t"
        case SuccTy(pred):
            return f"succ({format_multitype(pred)})"
        case Arrow(argument, result):
            return f"{format_opt(argument)} -> {format_multitype(result)}"
    raise TypeError(f"not a type: {ty!r}")


def format_multitype(m: Multitype) -> str:
    return "[" + ", ".join(format_type(ty) for ty in m.members) + "]" + m.nature.value


def format_opt(m: OptMultitype) -> str:
    return "bot" if m is None else format_multitype(m)


def format_family(family: MultitypeFamily) -> str:
    return "<" + ", ".join(format_multitype(m) for m in family.members) + ">"


def format_typing_ctx(ctx: TypingContext) -> str:
    return ", ".join(f"{x}:{format_multitype(ctx[x])}" for x in sorted(ctx))


def format_family_ctx(ctx: FamilyContext) -> str:
    return ", ".join(f"{x}:{format_family(ctx[x])}" for x in sorted(ctx))


TYPE_GRAMMAR = r"""
multitype: "[" [_types] "]" NATURE
_types: type ("," type)*

?type: "0t" -> zero_type
     | "succ" "(" multitype ")" -> succ_type
     | opt "->" multitype -> arrow_type

?opt: multitype
    | "bot" -> bot

family: "<" [_multitypes] ">"
_multitypes: multitype ("," multitype)*

NATURE: "nat" | "abs"

%import common.WS
%ignore WS
"""


class _TypeBuilder(Transformer):
    def multitype(self, items):
        *members, nature = items
        return Multitype(Nature(str(nature)), tuple(m for m in members if m is not None))

    def zero_type(self, _):
        return ZeroTy()

    def succ_type(self, items):
        return SuccTy(items[0])

    def arrow_type(self, items):
        return Arrow(items[0], items[1])

    def bot(self, _):
        return None

    def family(self, items):
        return MultitypeFamily(tuple(m for m in items if m is not None))


_TYPE_PARSER = Lark(
    TYPE_GRAMMAR,
    start=["multitype", "opt", "family"],
    parser="lalr",
    lexer="basic",
    transformer=_TypeBuilder(),
)


def _parse(text: str, start: str):
    try:
        return _TYPE_PARSER.parse(text, start=start)
    except UnexpectedInput as err:
        raise to_parse_error(text, err) from None
    except (MalformedType, VisitError) as err:
        whole = SourceSpan(0, len(text.encode("utf-8")))
        raise ParseError(whole, str(getattr(err, "orig_exc", err))) from None


def parse_multitype(text: str) -> Multitype:
    """Read ``[0t, succ([]nat)]nat`` style text."""
    return _parse(text, "multitype")


def parse_opt(text: str) -> OptMultitype:
    """Read a multitype or ``bot``."""
    return _parse(text, "opt")


def parse_family(text: str) -> MultitypeFamily:
    """Read ``<[]nat, [0t]nat>`` style text."""
    return _parse(text, "family")
