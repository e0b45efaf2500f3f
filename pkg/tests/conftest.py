import pytest

from graphmark import harness


@pytest.fixture(scope="session")
def ba_small():
    return harness.generate("ba", 400, {"a": 3}, seed=11)


@pytest.fixture(scope="session")
def ba_medium():
    return harness.generate("ba", 3000, {"a": 3}, seed=12)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
