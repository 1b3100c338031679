"""
PCF_H Concrete Syntax
=====================

Reader and printer for ``.pcfh`` source text.

    term   := \\x. term | fix f. term | application
    atom   := x | 0 | 42 | S atom | ifz(term; term; x. term) | (term)

Application is left-associative, abstraction and fix bodies extend as far
right as possible, decimal literals desugar to ``S(...(S 0))`` and ``#``
starts a comment that runs to the end of the line.
"""

from dataclasses import dataclass
from pathlib import Path

from lark import Lark, Transformer
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken

from syntax import Abs, App, Fix, IfZ, Succ, Term, Var, Zero, numeral


TERM_GRAMMAR = r"""
?term: spine

?spine: cseq
      | open
      | cseq open -> app

?cseq: closed
     | cseq closed -> app

?open: lam
     | fix
     | _SUCC open -> succ

?closed: var
       | NUMBER -> numeral
       | _SUCC closed -> succ
       | ifz
       | "(" term ")"

lam: _LAMBDA NAME "." term
fix: _FIX NAME "." term
ifz: _IFZ "(" term ";" term ";" NAME "." term ")"
var: NAME

_LAMBDA: "\\" | "λ"
_SUCC: "S"
_FIX: "fix"
_IFZ: "ifz"
NAME: /[a-zA-Z_][a-zA-Z0-9_']*/
NUMBER: /0|[1-9][0-9]*/

COMMENT: /#[^\n]*/
%import common.WS
%ignore WS
%ignore COMMENT
"""

# Terminals that may never stand where an identifier is expected.
RESERVED_TERMINALS = {"_SUCC": "S", "_FIX": "fix", "_IFZ": "ifz"}


@dataclass(frozen=True)
class SourceSpan:
    """Byte offsets into the UTF-8 encoded input, ``start <= end``."""

    start: int
    end: int


class ParseError(ValueError):
    """Raised when source text is not in the grammar."""

    def __init__(self, span: SourceSpan, message: str):
        super().__init__(f"{message} (bytes {span.start}-{span.end})")
        self.span = span
        self.message = message


class _TermBuilder(Transformer):
    """Turns parse-tree nodes into syntax terms as the LALR parser reduces."""

    def var(self, items):
        return Var(str(items[0]))

    def numeral(self, items):
        return numeral(int(items[0]))

    def succ(self, items):
        return Succ(items[0])

    def app(self, items):
        return App(items[0], items[1])

    def lam(self, items):
        name, body = items
        return Abs(str(name), body)

    def fix(self, items):
        name, body = items
        return Fix(str(name), body)

    def ifz(self, items):
        guard, then_branch, name, else_branch = items
        return IfZ(guard, then_branch, str(name), else_branch)


_TERM_PARSER = Lark(
    TERM_GRAMMAR,
    start="term",
    parser="lalr",
    lexer="basic",
    transformer=_TermBuilder(),
)


def _byte_offset(text: str, index: int) -> int:
    return len(text[: max(0, min(index, len(text)))].encode("utf-8"))


def to_parse_error(text: str, err: UnexpectedInput) -> ParseError:
    """
    Translate a lark error into a located ParseError.

    Args:
        text: The source text that failed to parse
        err: The exception raised by lark

    Returns:
        ParseError with a byte span and a human-readable message
    """
    end_of_input = SourceSpan(_byte_offset(text, len(text)), _byte_offset(text, len(text)))

    if isinstance(err, UnexpectedCharacters):
        start = _byte_offset(text, err.pos_in_stream)
        return ParseError(
            SourceSpan(start, _byte_offset(text, err.pos_in_stream + 1)),
            f"unexpected character {err.char!r}",
        )

    if isinstance(err, UnexpectedEOF):
        return ParseError(end_of_input, "unexpected end of input")

    if isinstance(err, UnexpectedToken):
        token = err.token
        expected = set(err.expected)
        if token.type == "$END":
            if "RPAR" in expected:
                return ParseError(end_of_input, "unbalanced parentheses: missing ')'")
            return ParseError(end_of_input, "unexpected end of input")

        span = SourceSpan(
            _byte_offset(text, token.start_pos),
            _byte_offset(text, token.end_pos),
        )
        if token.type == "RPAR" and "RPAR" not in expected:
            return ParseError(span, "unbalanced parentheses: unexpected ')'")
        if "NAME" in expected and (
            token.type in RESERVED_TERMINALS or (token.type == "NUMBER" and str(token) == "0")
        ):
            return ParseError(span, f"reserved word {str(token)!r} cannot be used as an identifier")
        return ParseError(span, f"unexpected token {str(token)!r}")

    return ParseError(end_of_input, str(err))


def parse_term(text: str) -> Term:
    """
    Parse PCF_H source text.

    Args:
        text: Source in the concrete syntax

    Returns:
        The parsed term

    Raises:
        ParseError: when the text is not in the grammar
    """
    try:
        return _TERM_PARSER.parse(text)
    except UnexpectedInput as err:
        raise to_parse_error(text, err) from None


def read_term_file(path: Path) -> Term:
    """Parse a ``.pcfh`` file."""
    return parse_term(Path(path).read_text(encoding="utf-8"))


def _needs_parens_as_fun(t: Term) -> bool:
    return isinstance(t, (Abs, Fix, Succ))


def _needs_parens_as_arg(t: Term) -> bool:
    return isinstance(t, (App, Abs, Fix, Succ))


def _wrap(text: str, parens: bool) -> str:
    return f"({text})" if parens else text


def print_term(t: Term) -> str:
    """Render a term so that ``parse_term`` reads it back alpha-equal."""
    match t:
        case Var(name):
            return name
        case Zero():
            return "0"
        case Succ(inner):
            return "S " + _wrap(print_term(inner), _needs_parens_as_arg(inner))
        case Abs(binder, body):
            return f"\\{binder}. {print_term(body)}"
        case Fix(binder, body):
            return f"fix {binder}. {print_term(body)}"
        case App(fun, arg):
            return (
                _wrap(print_term(fun), _needs_parens_as_fun(fun))
                + " "
                + _wrap(print_term(arg), _needs_parens_as_arg(arg))
            )
        case IfZ(guard, then_branch, binder, else_branch):
            return (
                f"ifz({print_term(guard)}; {print_term(then_branch)}; "
                f"{binder}. {print_term(else_branch)})"
            )
    raise TypeError(f"not a term: {t!r}")
