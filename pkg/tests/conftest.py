import pytest

_RESULTS = {}


@pytest.fixture
def record():
    """Store one acceptance line; the test then asserts on the same flag."""
    def _record(number, title, ok, detail):
        _RESULTS[number] = (title, bool(ok), detail)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        title, ok, detail = _RESULTS[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:2d} {title}: {detail}")
