from pathlib import Path

import pytest

from nvreadout import data_path, levels


@pytest.fixture
def reference_rates():
    return levels.REFERENCE_RATES


@pytest.fixture
def data():
    return lambda name: Path(str(data_path(name)))


def pytest_terminal_summary(terminalreporter):
    from tests.test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
