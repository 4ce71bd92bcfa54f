"""PASS/FAIL bookkeeping for the acceptance suite."""

import time
from contextlib import contextmanager

RESULTS: dict = {}


@contextmanager
def criterion(number: int, title: str, limit_s: float | None = None):
    """Time the block, record one verdict line, and re-raise any failure."""
    start = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        _record(number, False, f"{title} ({elapsed:.2f} s): {type(exc).__name__}: {exc}".splitlines()[0])
        raise
    elapsed = time.perf_counter() - start
    if limit_s is not None and elapsed >= limit_s:
        _record(number, False, f"{title} ({elapsed:.2f} s, limit {limit_s:g} s)")
        raise AssertionError(f"criterion {number} took {elapsed:.2f} s, limit {limit_s:g} s")
    _record(number, True, f"{title} ({elapsed:.2f} s)")


def _record(number, ok, text):
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {text}"
    RESULTS[number] = line
    print(line)


def summary_lines() -> list:
    return [RESULTS[k] for k in sorted(RESULTS)]
