import pytest

from pdl_optics.core import make_grid

# (criterion, name, passed, detail) lines collected by the acceptance module
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def grid():
    return make_grid(4096, 40.0)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(ACCEPTANCE_LINES):
        flag = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{flag}  [{number:>2}] {name}: {detail}")
