"""Shared session fixtures: sieve tables, the bump weight, the bundled
zero table, and the three experiment reports reused across test modules.

The ``criterion`` fixture records one PASS/FAIL line per acceptance
criterion; the lines are echoed in the terminal summary so a plain
``pytest -v`` run shows each verdict.
"""

import math

import pytest

TABLE_LIMIT = 200_000

_CRITERION_LINES: list[str] = []


@pytest.fixture(scope="session")
def tables():
    from zetalab.arith import sieve_tables

    return sieve_tables(TABLE_LIMIT)


@pytest.fixture(scope="session")
def weight():
    from zetalab.weights import make_bump_weight

    return make_bump_weight()


@pytest.fixture(scope="session")
def zs100():
    from zetalab.zerosets import fixture_zeroset

    return fixture_zeroset()


@pytest.fixture(scope="session")
def bow_report(weight):
    from zetalab.experiments import bow_experiment

    return bow_experiment(math.exp(10.0), 0.55, 1.0, weight=weight)


@pytest.fixture(scope="session")
def ap_report(weight):
    from zetalab.experiments import ap_obstruction_experiment

    return ap_obstruction_experiment(weight=weight)


@pytest.fixture(scope="session")
def dichotomy_report(zs100, tables, weight):
    from zetalab.experiments import dichotomy_experiment

    return dichotomy_experiment(zs100, tables, weight=weight, jobs=4)


@pytest.fixture
def criterion():
    def record(num: int, name: str, ok: bool, detail: str) -> bool:
        verdict = "PASS" if ok else "FAIL"
        _CRITERION_LINES.append(
            f"criterion {num:02d} [{verdict}] {name}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_CRITERION_LINES):
        terminalreporter.write_line(line)
