import pytest

_LINES_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Return ``record(number, ok, detail)``; lines are echoed in the terminal summary."""
    lines = request.config.stash.setdefault(_LINES_KEY, [])

    def record(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        lines.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
