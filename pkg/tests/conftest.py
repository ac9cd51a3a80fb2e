"""Shared test plumbing: the acceptance report section.

Acceptance tests record one PASS/FAIL line per criterion; the lines are
echoed in a dedicated section after the run so the verdicts are visible
even when pytest captures stdout.
"""

ACCEPTANCE_LINES = []


def record_criterion(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
