import numpy as np
import pytest

from moritak.generate import SuiteConfig, trial_rng

SMALL = SuiteConfig(seed=7, trials=5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def cfg():
    return SMALL


def seeded(stream, n):
    """``n`` independent Philox generators for parametrized randomized tests."""
    return [trial_rng(SMALL.seed, stream, t) for t in range(n)]


def unit(n, i, j):
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1.0
    return e


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
