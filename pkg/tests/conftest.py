import os

import pytest


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run long experiments")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running experiment, opt-in via --runslow or ARMAC_SLOW=1")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow") or os.environ.get("ARMAC_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="long experiment; use --runslow or ARMAC_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


_VERDICTS = []


@pytest.fixture
def verdict(capsys):
    """Record and print one acceptance line: ``verdict(number, passed, detail)``."""

    def record(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        _VERDICTS.append(line)
        with capsys.disabled():
            print("\n" + line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
