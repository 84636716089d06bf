import itertools

import numpy as np
import pytest

from sygrand.codes import get_code


@pytest.fixture(scope="session")
def ebch_32_21():
    return get_code("ebch-32-21")


@pytest.fixture(scope="session")
def ebch_8_4():
    return get_code("ebch-8-4")


@pytest.fixture(scope="session")
def bch_15_7():
    return get_code("bch-15-7")


def all_vectors(n):
    return [np.array(bits, dtype=np.uint8) for bits in itertools.product((0, 1), repeat=n)]


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one acceptance criterion: prints a pass/fail line and fails the
    test when the criterion is not met."""

    def _report(number, title, ok, detail):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        print(line)
        _ACCEPTANCE_LINES.append(line)
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
