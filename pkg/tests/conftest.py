import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Recap the acceptance scoreboard after capture has ended."""
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "SCOREBOARD", None) if module else None
    if lines:
        terminalreporter.section("acceptance scoreboard")
        for line in lines:
            terminalreporter.write_line(line)
