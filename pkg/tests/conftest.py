import numpy as np
import pytest

from minl.qstate import bell_state, random_density


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def phi_plus():
    return bell_state("phi+").density()


@pytest.fixture
def random_state_22(rng):
    return random_density(4, 4, rng, (2, 2))


_ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion():
    """Record one pass/fail line for the acceptance summary; returns the pass flag."""

    def report(label: str, passed: bool, detail: str) -> bool:
        line = f"{'PASS' if passed else 'FAIL'}  {label}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
