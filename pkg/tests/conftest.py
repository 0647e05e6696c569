import pytest

_ACCEPTANCE = []


class AcceptanceLog:
    def check(self, label, ok, detail=""):
        _ACCEPTANCE.append((label, bool(ok), detail))
        assert ok, f"{label}: {detail}"


@pytest.fixture
def acceptance():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")
