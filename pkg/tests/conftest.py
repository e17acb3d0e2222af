import warnings

import numpy as np
import pytest

from pmkdv.errors import TailTruncationWarning
from pmkdv.spectral import Grid


@pytest.fixture
def wide_grid():
    return Grid(1024, 20.0)


@pytest.fixture
def small_grid():
    return Grid(64, np.pi)


@pytest.fixture(autouse=True)
def _quiet_tails():
    # the narrow preset domains trip the tail warning on purpose
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TailTruncationWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for num in sorted(results):
            terminalreporter.write_line(results[num])
