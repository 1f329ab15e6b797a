import sys

import numpy as np
import pytest

from tempered_wsgd.stability import bounds


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def admissible_gamma4(rng, alpha):
    """A free parameter strictly inside the third-order stability interval."""
    b = bounds(alpha)
    return b.a3 + (b.a4 - b.a3) * rng.uniform(0.05, 0.95)


def admissible_gamma3(rng, alpha):
    b = bounds(alpha)
    return b.a1 + (b.a2 - b.a1) * rng.uniform(0.05, 0.95)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.verdict_lines():
        terminalreporter.write_line(line)
