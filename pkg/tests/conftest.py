from pathlib import Path

import pytest

from mudt.conllu import read_treebank

FIXTURES = Path(__file__).parent / "fixtures"

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    number, title = marker.args
    entry = _criteria.setdefault(number, {"title": title, "passed": True, "ran": False})
    if report.when == "call":
        entry["ran"] = True
    if report.failed or report.skipped:
        entry["passed"] = False


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        status = "PASS" if entry["passed"] and entry["ran"] else "FAIL"
        terminalreporter.write_line(f"AC{number} {status}  {entry['title']}")


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def ud_pair():
    return read_treebank(FIXTURES / "divergence_gold.conllu"), read_treebank(FIXTURES / "divergence_pred.conllu")
