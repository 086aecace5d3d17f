import pytest

# filled by tests/test_acceptance.py: (criterion number, passed, detail)
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {num}: {detail}")


@pytest.fixture
def record_criterion():
    def record(num: int, ok: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append((num, bool(ok), detail))
        print(f"{'PASS' if ok else 'FAIL'} criterion {num}: {detail}")
        assert ok, detail
    return record
