import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fockzero.lattice import LatticeSpec
from fockzero.sigma import TruncationPolicy

# transcript lines appended by the acceptance module, echoed at session end
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def unit_spec():
    """alpha = pi, so the pitch is exactly 1; R = 0.75."""
    return LatticeSpec(alpha=math.pi, r_shift=0.75)


@pytest.fixture(scope="session")
def unit_spec_r1():
    return LatticeSpec(alpha=math.pi, r_shift=1.0)


@pytest.fixture(scope="session")
def tight_policy():
    return TruncationPolicy(m_min=16, tol=1e-8, max_doublings=12)


@pytest.fixture(scope="session")
def fast_policy():
    return TruncationPolicy(m_min=8, tol=1e-6, max_doublings=12)
