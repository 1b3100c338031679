"""
Batch Runner
============

Runs one command over several files, a bounded number at a time, and
returns the outcomes in input order.
"""

import asyncio
import logging
from pathlib import Path
from typing import Callable, NamedTuple, Sequence


logger = logging.getLogger(__name__)


class Outcome(NamedTuple):
    """Exit code plus the lines meant for stdout and stderr."""

    code: int
    out: tuple[str, ...] = ()
    err: tuple[str, ...] = ()


Worker = Callable[[Path], Outcome]


async def run_batch(paths: Sequence[Path], worker: Worker, jobs: int = 1) -> list[Outcome]:
    """
    Run ``worker`` on every path with at most ``jobs`` running at once.

    Args:
        paths: Input files
        worker: Blocking function producing an Outcome for one file
        jobs: Maximum number of concurrent workers

    Returns:
        One Outcome per path, in the order of ``paths``
    """
    semaphore = asyncio.Semaphore(max(1, jobs))

    async def run_one(path: Path) -> Outcome:
        async with semaphore:
            logger.debug("starting %s", path)
            outcome = await asyncio.to_thread(worker, path)
            logger.debug("finished %s with exit code %d", path, outcome.code)
            return outcome

    return list(await asyncio.gather(*(run_one(Path(p)) for p in paths)))


def run_batch_sync(paths: Sequence[Path], worker: Worker, jobs: int = 1) -> list[Outcome]:
    """Run a batch from synchronous code; a single job skips the event loop."""
    if jobs <= 1:
        return [worker(Path(p)) for p in paths]
    return asyncio.run(run_batch(paths, worker, jobs))


def combined_exit_code(outcomes: Sequence[Outcome]) -> int:
    return max((o.code for o in outcomes), default=0)
