"""Shared pytest plumbing: the acceptance scorecard.

tests/test_acceptance.py registers one line per criterion; printing
them from a terminal-summary hook keeps them visible even though
pytest captures test output at the file-descriptor level.
"""

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.line(line)
