"""
Batch Progress Output
=====================

Functions for displaying headers and summaries when several files are run
in one invocation.
"""

from pathlib import Path
from typing import Sequence

from batch import Outcome


# Exit code meaning, for the summary line.
OUTCOME_LABELS = {
    0: "ok",
    1: "error",
    2: "failed",
    3: "stuck",
    4: "out of fuel",
}


def count_outcomes(outcomes: Sequence[Outcome]) -> tuple[int, int]:
    """
    Count successful and total outcomes.

    Args:
        outcomes: Per-file outcomes of a batch

    Returns:
        (ok_count, total_count)
    """
    total = len(outcomes)
    ok = sum(1 for outcome in outcomes if outcome.code == 0)
    return ok, total


def batch_header(command: str, file_count: int, jobs: int) -> list[str]:
    """Formatted header lines for a batch."""
    return [
        "=" * 70,
        f"  BATCH: {command} on {file_count} files ({jobs} jobs)",
        "=" * 70,
    ]


def file_header(path: Path) -> str:
    return f"--- {path} ---"


def batch_summary(outcomes: Sequence[Outcome]) -> list[str]:
    """Summary lines: pass ratio, then a count per kind of outcome."""
    ok, total = count_outcomes(outcomes)
    lines = []
    if total > 0:
        percentage = (ok / total) * 100
        lines.append(f"Progress: {ok}/{total} files ok ({percentage:.1f}%)")
    else:
        lines.append("Progress: no files given")
    counts = {}
    for outcome in outcomes:
        label = OUTCOME_LABELS.get(outcome.code, f"exit {outcome.code}")
        counts[label] = counts.get(label, 0) + 1
    if counts:
        lines.append(", ".join(f"{label}: {n}" for label, n in counts.items()))
    return lines


def print_batch_header(command: str, file_count: int, jobs: int) -> None:
    print()
    for line in batch_header(command, file_count, jobs):
        print(line)
    print()


def print_batch_summary(outcomes: Sequence[Outcome]) -> None:
    """Print a summary of a finished batch."""
    print()
    for line in batch_summary(outcomes):
        print(line)
