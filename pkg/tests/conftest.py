import pytest

_RESULTS = []


class AcceptanceLog:
    def record(self, criterion, passed, detail=""):
        status = passed if isinstance(passed, str) else ("PASS" if passed else "FAIL")
        _RESULTS.append((str(criterion), status, detail))
        return passed


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, status, detail in sorted(_RESULTS, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{status}] criterion {criterion}: {detail}")
