"""
Tests for the batch runner and progress output
==============================================
"""

import threading
import time
from pathlib import Path

import pytest

from batch import Outcome, combined_exit_code, run_batch, run_batch_sync
from progress import batch_header, batch_summary, count_outcomes, file_header


def _echo(path: Path) -> Outcome:
    return Outcome(0, (path.name,))


class TestRunBatch:
    """Test concurrent execution with ordered results."""

    @pytest.mark.asyncio
    async def test_order_is_preserved(self):
        paths = [Path(f"f{i}.pcfh") for i in range(8)]

        def slow_first(path: Path) -> Outcome:
            if path.name == "f0.pcfh":
                time.sleep(0.05)
            return _echo(path)

        outcomes = await run_batch(paths, slow_first, jobs=4)
        assert [o.out[0] for o in outcomes] == [p.name for p in paths]

    @pytest.mark.asyncio
    async def test_concurrency_is_bounded(self):
        lock = threading.Lock()
        running = 0
        peak = 0

        def worker(path: Path) -> Outcome:
            nonlocal running, peak
            with lock:
                running += 1
                peak = max(peak, running)
            time.sleep(0.02)
            with lock:
                running -= 1
            return _echo(path)

        await run_batch([Path(f"f{i}") for i in range(6)], worker, jobs=2)
        assert peak <= 2

    @pytest.mark.asyncio
    async def test_empty_batch(self):
        assert await run_batch([], _echo, jobs=3) == []

    def test_sync_single_job(self):
        outcomes = run_batch_sync([Path("a"), Path("b")], _echo, jobs=1)
        assert [o.out for o in outcomes] == [("a",), ("b",)]

    def test_sync_many_jobs(self):
        outcomes = run_batch_sync([Path("a"), Path("b"), Path("c")], _echo, jobs=3)
        assert [o.out for o in outcomes] == [("a",), ("b",), ("c",)]

    def test_sync_empty_batch(self):
        assert run_batch_sync([], _echo, jobs=2) == []


class TestExitCodes:
    """Test combining per-file exit codes."""

    def test_worst_code_wins(self):
        assert combined_exit_code([Outcome(0), Outcome(3), Outcome(1)]) == 3

    def test_no_outcomes(self):
        assert combined_exit_code([]) == 0


class TestProgress:
    """Test batch headers and summaries."""

    def test_count_outcomes(self):
        assert count_outcomes([Outcome(0), Outcome(2), Outcome(0)]) == (2, 3)

    def test_header(self):
        lines = batch_header("eval", 3, 2)
        assert lines[1] == "  BATCH: eval on 3 files (2 jobs)"
        assert lines[0] == "=" * 70

    def test_file_header(self):
        assert file_header(Path("programs/loop.pcfh")) == "--- programs/loop.pcfh ---"

    def test_summary(self):
        lines = batch_summary([Outcome(0), Outcome(4), Outcome(0), Outcome(3)])
        assert lines[0] == "Progress: 2/4 files ok (50.0%)"
        assert lines[1] == "ok: 2, out of fuel: 1, stuck: 1"

    def test_empty_summary(self):
        assert batch_summary([]) == ["Progress: no files given"]
