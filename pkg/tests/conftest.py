import warnings

import pytest

from heston_is.config import DEEP_OTM, HIGH_VOL
from heston_is.model import FellerWarning


@pytest.fixture
def high_vol():
    return HIGH_VOL


@pytest.fixture
def deep_otm():
    return DEEP_OTM


@pytest.fixture(autouse=True)
def _quiet_feller():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FellerWarning)
        yield


ACCEPTANCE_LINES: list[str] = []


def record_acceptance(criterion: str, passed: bool, detail: str) -> None:
    line = f"criterion {criterion:<3} {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
