import pytest

ACCEPTANCE = []


@pytest.fixture
def record():
    """Record one acceptance line; call as record(criterion, passed, detail)."""

    def _record(criterion, passed, detail=""):
        ACCEPTANCE.append(f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}")
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
