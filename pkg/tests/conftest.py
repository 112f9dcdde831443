import itertools

import pytest
from hypothesis import HealthCheck, settings

from symres.cnf import Literal

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def satisfies(assignment: dict, clause) -> bool:
    return any(assignment[l.var] == l.positive for l in clause)


def all_assignments(variables):
    variables = list(variables)
    for bits in itertools.product((False, True), repeat=len(variables)):
        yield dict(zip(variables, bits))


def entailed(premises, conclusion, variables) -> bool:
    """Exhaustive check that every model of ``premises`` satisfies ``conclusion``."""
    return all(
        satisfies(a, conclusion) for a in all_assignments(variables) if all(satisfies(a, c) for c in premises)
    )


def flip(lit: Literal) -> Literal:
    return -lit


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
