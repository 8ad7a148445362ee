import numpy as np
import pytest

from subexp_bump.construct import run_pipeline
from subexp_bump.params import BumpParams, DecaySpec

# Acceptance lines collected by test_acceptance and echoed in the terminal summary.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def default_spec():
    return DecaySpec(0.5, 4.0, 0.1)


@pytest.fixture(scope="session")
def artifacts(default_spec):
    return run_pipeline(default_spec)


@pytest.fixture(scope="session")
def p11():
    return BumpParams.from_AB(1.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
