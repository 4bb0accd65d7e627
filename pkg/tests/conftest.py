import numpy as np
import pytest

from spectral_sums import build_dirichlet_1d, build_hermite_1d


@pytest.fixture(scope="session")
def dirichlet64():
    return build_dirichlet_1d(np.pi, 64)


@pytest.fixture(scope="session")
def hermite64():
    return build_hermite_1d(64)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
