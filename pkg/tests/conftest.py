from pathlib import Path

import pytest

from slmbubble.market_data import read_series

FIXTURE = Path(__file__).resolve().parents[1] / "src" / "slmbubble" / "data" / "linkedin_format_fixture.csv"


@pytest.fixture(scope="session")
def linkedin_path():
    return FIXTURE


@pytest.fixture(scope="session")
def linkedin(linkedin_path):
    return read_series(linkedin_path)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in RESULTS:
        terminalreporter.write_line(line)
