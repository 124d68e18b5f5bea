"""Suite-wide wiring: the acceptance check registry.

Acceptance tests record a one-line verdict each; the lines are echoed
in the terminal summary so they stay visible regardless of capture
settings.
"""

ACCEPTANCE_LINES = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.line(line)
