"""Shared fixtures: the acceptance recorder and random profile factories."""

from __future__ import annotations

import contextlib
import time

import numpy as np
import pytest

_RESULTS = pytest.StashKey[dict]()


class Criterion:
    """Collects the checks of one acceptance criterion."""

    def __init__(self, number: int, title: str):
        self.number = number
        self.title = title
        self.details: list[str] = []
        self.failures: list[str] = []
        self.start = time.perf_counter()

    def check(self, ok: bool, detail: str) -> None:
        self.details.append(detail)
        if not ok:
            self.failures.append(detail)

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start


@pytest.fixture
def criterion(request):
    """Context manager factory recording a PASS/FAIL line per criterion."""
    store = request.config.stash.setdefault(_RESULTS, {})

    @contextlib.contextmanager
    def run(number: int, title: str):
        c = Criterion(number, title)
        try:
            yield c
        except Exception as exc:
            store[number] = (title, False, f"{type(exc).__name__}: {exc}", c.elapsed)
            raise
        ok = not c.failures
        detail = "; ".join(c.failures if c.failures else c.details[-3:])
        store[number] = (title, ok, detail, c.elapsed)
        assert ok, "\n".join(c.failures)

    return run


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_RESULTS, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store):
        title, ok, detail, elapsed = store[number]
        terminalreporter.write_line(
            f"criterion {number:2d} {'PASS' if ok else 'FAIL'} {title} ({elapsed:.2f} s) {detail}"
        )


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)
