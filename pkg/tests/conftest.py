import pytest

ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one acceptance line, then assert it."""

    def record(number, name, passed, detail=""):
        ACCEPTANCE.append((number, name, bool(passed), detail))
        print(f"{'PASS' if passed else 'FAIL'} criterion {number} {name}: {detail}")
        assert passed, f"criterion {number} ({name}) failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} [{number:>2}] {name}: {detail}")
