import functools

import numpy as np
import pytest

from epochgph.model import ArfimaModel
from epochgph.montecarlo import run_mc_detailed


@pytest.fixture
def fn03():
    """Fractional noise with d = 0.3 and unit innovation variance."""
    return ArfimaModel(0.3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@functools.lru_cache(maxsize=None)
def _cached_run(config):
    return run_mc_detailed(config, workers=4)


@pytest.fixture(scope="session")
def mc():
    """Run a Monte Carlo config once per session (configs are hashable)."""
    return _cached_run


_CRITERIA = []


@pytest.fixture
def criterion():
    """Record a PASS/FAIL line for the acceptance summary."""
    def record(name, ok, detail=""):
        _CRITERIA.append((name, bool(ok), detail))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
