import pytest

_LINES: list[tuple[int, str]] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line; the lines are printed in the terminal summary."""

    def record(number: int, name: str, ok: bool, detail: str) -> None:
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {name}: {detail}"
        print(line)
        _LINES.append((number, line))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_LINES):
        terminalreporter.write_line(line)
