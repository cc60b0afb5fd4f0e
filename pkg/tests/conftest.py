import sys
from pathlib import Path

# lets tests import the shared oracles module
sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n = mark.args[0]
    if call.excinfo is not None and call.when in ("setup", "call"):
        _criteria[n] = "FAIL"
    elif call.when == "call":
        _criteria.setdefault(n, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        terminalreporter.write_line(f"CRITERION {n}: {_criteria[n]}")
