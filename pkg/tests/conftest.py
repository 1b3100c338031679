"""
Shared fixtures and helpers for the PCF_H test suite.
=====================================================

Provides the worked derivations, bundled programs and temporary
directories used across test modules.
"""

import sys
import tempfile
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))
sys.path.insert(0, str(Path(__file__).parent))

from derivation import Derivation, check_derivation, t_abs, t_app, t_var1, t_zero  # noqa: E402
from evaluation import Nature, Position  # noqa: E402
from reader import parse_term  # noqa: E402
from syntax import App, Var, Zero  # noqa: E402
from typesystem import Arrow, Multitype, empty  # noqa: E402


DOUBLING = "(fix f. \\n. ifz(n; 0; m. S (S (f m)))) (S 0)"
TWO_STEP = "ifz(S 0; \\z.z; x. \\y. x) (S (S 0))"
DIAMOND = "((\\x. S x) 0) (ifz(0; \\z.z; y. y (\\z.z)))"
STUCK = "(S 0) (\\z.z)"


def parse(text: str):
    """Shorthand used throughout the tests."""
    return parse_term(text)


def checked(d: Derivation) -> Derivation:
    """Run the checker and hand the derivation back."""
    check_derivation(d)
    return d


def walk(d: Derivation):
    """Every node of a derivation, parents before premises."""
    yield d
    for premise in d.premises:
        yield from walk(premise)


def node_at(d: Derivation, path) -> Derivation:
    """The node typing the subterm at a redex position."""
    for label in path:
        d = d.premises[1 if label is Position.ARG else 0]
    return d


def lambda_x_x0_derivation() -> Derivation:
    """
    The non-tight derivation of ``\\x. x 0`` with counter {B}.

    x is assumed at ``[[]nat -> []abs]abs``, applied to 0 at ``[]nat``.
    """
    arrow = Multitype(Nature.ABS, (Arrow(empty(Nature.NAT), empty(Nature.ABS)),))
    application = t_app(t_var1("x", arrow), t_zero(0))
    return t_abs("x", App(Var("x"), Zero()), [application])


@pytest.fixture
def doubling():
    return parse(DOUBLING)


@pytest.fixture
def two_step():
    return parse(TWO_STEP)


@pytest.fixture
def diamond_term():
    return parse(DIAMOND)


@pytest.fixture
def stuck_term():
    return parse(STUCK)


@pytest.fixture
def lambda_x_x0():
    return lambda_x_x0_derivation()


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as temp:
        yield Path(temp)


@pytest.fixture
def clean_env(monkeypatch):
    """Remove every PCFH_* variable from the environment."""
    for var in ("PCFH_FUEL", "PCFH_STRATEGY", "PCFH_STRICT_ZERO", "PCFH_JOBS"):
        monkeypatch.delenv(var, raising=False)
    return monkeypatch
