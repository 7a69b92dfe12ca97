import sys

import pytest

from baker_sunit.baker_bounds import SUnitEquation
from baker_sunit.number_fields import RATIONALS, FieldDescriptor, PlaceSet

FIXTURE_PRIMES = [(2,), (2, 3), (2, 3, 5), (3, 5, 7, 11)]
FIXTURE_COEFFS = [(1, 1), (3, 5), (1, 2)]
FIXTURE_CAP = 12


def rational_equation(primes, alpha=1, beta=1):
    return SUnitEquation(
        PlaceSet.from_spec(RATIONALS, primes), RATIONALS.element(alpha), RATIONALS.element(beta)
    )


def fixture_suite():
    return [rational_equation(p, a, b) for p in FIXTURE_PRIMES for a, b in FIXTURE_COEFFS]


@pytest.fixture
def Q():
    return RATIONALS


@pytest.fixture
def Q2():
    return FieldDescriptor(2)


@pytest.fixture(scope="session")
def suite_solutions():
    from baker_sunit.sunit_solver import enumerate_solutions

    return [(eq, enumerate_solutions(eq, FIXTURE_CAP)) for eq in fixture_suite()]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
