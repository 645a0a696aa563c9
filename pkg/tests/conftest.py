import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from goldbach_audit.sieve import build_sieve, build_spf  # noqa: E402

import oracles  # noqa: E402

SMALL = 2 * 10**5


@pytest.fixture(scope="session")
def table():
    return build_sieve(SMALL)


@pytest.fixture(scope="session")
def spf():
    return build_spf(SMALL)


@pytest.fixture(scope="session")
def flags_1e4():
    return oracles.prime_flags_td(10**4)


@pytest.fixture(scope="session")
def table_1e7():
    return build_sieve(10**7)


@pytest.fixture(scope="session")
def table_1e8():
    return build_sieve(10**8)


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
