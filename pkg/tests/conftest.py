import pytest

from truncelb import baseline_params

ACCEPTANCE_LOG: list[str] = []


@pytest.fixture
def baseline():
    return baseline_params()


@pytest.fixture
def baseline_mu():
    """Reference calibration with the rounded ELB gap used in the region maps."""
    return baseline_params(mu=0.0101)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)
