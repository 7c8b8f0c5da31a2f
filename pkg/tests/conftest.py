import pytest

from primbounds.bounds import TableSource

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def tables():
    """One table memo for the whole session; tables are pure functions of (l, kind, K)."""
    return TableSource()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
