import numpy as np
import pytest

from authmark import assets

_results = []


@pytest.fixture(scope="session")
def cover():
    return assets.cover()


@pytest.fixture(scope="session")
def logo():
    return assets.logo()


@pytest.fixture(scope="session")
def corpus():
    return assets.corpus()


@pytest.fixture
def rng():
    return np.random.default_rng(20111)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _results.append((mark.args[0], mark.args[1], rep.outcome, item.name))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num, text, outcome, name in sorted(_results, key=lambda r: (r[0], r[3])):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {num}: {text} ({name})")
