import pytest

from stablab import QI, fixture, stability

_ACCEPTANCE_LINES: list = []


@pytest.fixture(scope="session")
def a2():
    return fixture("a2")


@pytest.fixture(scope="session")
def a1():
    return fixture("a1")


@pytest.fixture(scope="session")
def sigma(a2):
    """Z(S1) = i, Z(S2) = 1 + i: every indecomposable semistable."""
    return stability(a2, "H0", [QI(0, 1), QI(1, 1)])


@pytest.fixture(scope="session")
def sigma_unstable(a2):
    """Z(S1) = 1 + i, Z(S2) = i: X destabilised by S2."""
    return stability(a2, "H0", [QI(1, 1), QI(0, 1)])


@pytest.fixture(scope="session")
def acceptance_lines():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
