import warnings

import pytest

ACCEPTANCE_LINES = []


def record(number, title, passed, detail):
    line = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(autouse=True)
def _quiet_wide_slit_warning():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="sigma/d = .* exceeds")
        yield
