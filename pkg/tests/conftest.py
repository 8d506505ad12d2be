import pytest

# acceptance lines collected during the run, printed once at the end
ACCEPTANCE_LINES = []


@pytest.fixture
def report_line():
    def add(line: str):
        ACCEPTANCE_LINES.append(line)
        print(line)

    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
