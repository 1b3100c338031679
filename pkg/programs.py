"""
Bundled Programs
================

Sample terms shipped in the programs directory.
"""

from pathlib import Path

from reader import parse_term
from syntax import Term


PROGRAMS_DIR = Path(__file__).parent / "programs"
PROGRAM_SUFFIX = ".pcfh"


def program_path(name: str) -> Path:
    return PROGRAMS_DIR / f"{name}{PROGRAM_SUFFIX}"


def load_program(name: str) -> str:
    """Load the source text of a bundled program."""
    return program_path(name).read_text(encoding="utf-8")


def parse_program(name: str) -> Term:
    """Load and parse a bundled program."""
    return parse_term(load_program(name))


def list_programs() -> list[str]:
    """Names of the bundled programs, sorted."""
    return sorted(path.stem for path in PROGRAMS_DIR.glob(f"*{PROGRAM_SUFFIX}"))


def resolve_input(path: Path) -> Path:
    """
    Map a bare program name such as ``doubling`` to its bundled file.

    Paths that exist, or that do not name a bundled program, come back unchanged.
    """
    if path.exists() or len(path.parts) != 1 or path.suffix:
        return path
    bundled = program_path(path.name)
    return bundled if bundled.exists() else path
