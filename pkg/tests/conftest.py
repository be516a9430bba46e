import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dynamide import make_constants

settings.register_profile(
    "dynamide",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("dynamide")


@pytest.fixture
def k():
    return make_constants("natural")


@pytest.fixture
def k_si():
    return make_constants("si")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance criteria report one line each; echoed in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
