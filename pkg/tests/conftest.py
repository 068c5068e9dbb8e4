"""Shared pytest plumbing.

The acceptance suite records one human-readable pass/fail line per
criterion; they are replayed in a dedicated section after the run so the
verdicts are visible regardless of output capturing.
"""

ACCEPTANCE_LINES = []


def record(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
