import pytest

_CRITERION_LINES: list[str] = []


@pytest.fixture
def record_criterion():
    """Record one pass/fail line per acceptance criterion.

    Lines print immediately and again in a terminal summary section, so the
    per-criterion verdicts stay visible even with output capture on.
    """

    def _record(number: int, name: str, passed: bool) -> None:
        line = f"criterion {number:02d} {name}: {'PASS' if passed else 'FAIL'}"
        _CRITERION_LINES.append(line)
        print(line)

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(set(_CRITERION_LINES)):
            terminalreporter.write_line(line)
