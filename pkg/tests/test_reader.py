"""
Tests for the concrete syntax
=============================

Parsing, located parse errors and printing.
"""

import pytest
from hypothesis import given, settings

from reader import ParseError, SourceSpan, parse_term, print_term, read_term_file
from strategies import closed_terms, open_terms
from syntax import Abs, App, Fix, IfZ, Succ, Var, Zero, alpha_eq, numeral


class TestParse:
    """Test the term grammar."""

    def test_variable(self):
        assert parse_term("x") == Var("x")

    def test_application_is_left_associative(self):
        assert parse_term("f x y") == App(App(Var("f"), Var("x")), Var("y"))

    def test_abstraction_extends_right(self):
        assert parse_term("\\x. x y") == Abs("x", App(Var("x"), Var("y")))

    def test_unicode_lambda(self):
        assert parse_term("λx. x") == Abs("x", Var("x"))

    def test_trailing_abstraction_argument(self):
        assert parse_term("f \\x. x") == App(Var("f"), Abs("x", Var("x")))

    def test_successor_binds_tightly(self):
        assert parse_term("S 0") == Succ(Zero())
        assert parse_term("S S 0") == numeral(2)
        assert parse_term("f S 0") == App(Var("f"), Succ(Zero()))

    def test_decimal_literal_desugars(self):
        assert parse_term("3") == numeral(3)

    def test_fix(self):
        assert parse_term("fix f. f") == Fix("f", Var("f"))

    def test_ifz(self):
        t = parse_term("ifz(n; 0; m. S m)")
        assert t == IfZ(Var("n"), Zero(), "m", Succ(Var("m")))

    def test_comments_are_ignored(self):
        t = parse_term("# doubles\n(\\x. x) # identity\n0\n")
        assert t == App(Abs("x", Var("x")), Zero())

    def test_keyword_prefixed_names_are_identifiers(self):
        assert parse_term("Sx fixed") == App(Var("Sx"), Var("fixed"))

    def test_primes_in_names(self):
        assert parse_term("\\x'. x'") == Abs("x'", Var("x'"))


class TestParseErrors:
    """Test located parse errors."""

    def test_missing_close_paren(self):
        with pytest.raises(ParseError) as exc:
            parse_term("(\\x. x")
        assert "unbalanced" in exc.value.message
        assert exc.value.span == SourceSpan(6, 6)

    def test_unexpected_close_paren(self):
        with pytest.raises(ParseError) as exc:
            parse_term("x)")
        assert "unbalanced" in exc.value.message
        assert exc.value.span == SourceSpan(1, 2)

    def test_reserved_word_as_binder(self):
        with pytest.raises(ParseError) as exc:
            parse_term("\\S. x")
        assert "reserved" in exc.value.message

    def test_zero_as_binder(self):
        with pytest.raises(ParseError) as exc:
            parse_term("fix 0. 0")
        assert "reserved" in exc.value.message

    def test_bad_character_span_is_in_bytes(self):
        with pytest.raises(ParseError) as exc:
            parse_term("λx. $")
        assert exc.value.span == SourceSpan(5, 6)

    def test_empty_input(self):
        with pytest.raises(ParseError) as exc:
            parse_term("")
        assert "end of input" in exc.value.message

    def test_error_is_value_error(self):
        with pytest.raises(ValueError):
            parse_term("ifz(0; 0)")


class TestPrint:
    """Test the printer."""

    def test_numeral(self):
        assert print_term(numeral(2)) == "S (S 0)"

    def test_abstraction_argument_is_parenthesized(self):
        assert print_term(App(Var("f"), Abs("x", Var("x")))) == "f (\\x. x)"

    def test_successor_head_is_parenthesized(self):
        assert print_term(App(Succ(Zero()), Var("y"))) == "(S 0) y"

    def test_ifz(self):
        assert print_term(parse_term("ifz(n;0;m.S m)")) == "ifz(n; 0; m. S m)"

    @pytest.mark.slow
    @given(closed_terms())
    @settings(max_examples=10_000, deadline=None)
    def test_print_then_parse_is_alpha_equal(self, t):
        assert alpha_eq(parse_term(print_term(t)), t)

    @given(open_terms())
    @settings(max_examples=300)
    def test_open_terms_reparse(self, t):
        assert parse_term(print_term(t)) == t


class TestReadFile:
    """Test reading .pcfh files."""

    def test_reads_file(self, temp_dir):
        path = temp_dir / "id.pcfh"
        path.write_text("# identity\n\\x. x\n", encoding="utf-8")
        assert read_term_file(path) == Abs("x", Var("x"))

    def test_missing_file(self, temp_dir):
        with pytest.raises(OSError):
            read_term_file(temp_dir / "absent.pcfh")
