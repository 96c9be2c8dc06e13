import pytest

_ACCEPTANCE: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _ACCEPTANCE.append((name, "PASS" if report.outcome == "passed" else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        terminalreporter.write_line(f"{outcome}  {name}")


@pytest.fixture(scope="session")
def loops5():
    from loopoids.analysis import EnumerationSpec, enumerate_structures

    return enumerate_structures(EnumerationSpec(5, "loop", up_to_iso=True))
