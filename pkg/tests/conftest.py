import time

SESSION_START = time.perf_counter()
ACCEPTANCE_LINES: list[str] = []


def pytest_collection_modifyitems(items):
    # acceptance runs last so the runtime criterion sees the whole suite
    items.sort(key=lambda item: item.nodeid.startswith("tests/test_acceptance.py"))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
