import numpy as np
import pytest

from cstirap import ProtocolParams, evolve_adiabatic, evolve_schrodinger

# one pass/fail line per acceptance criterion, printed at the end of the run
ACCEPTANCE_RESULTS = []


def record_acceptance(number: int, description: str, passed: bool, detail: str):
    ACCEPTANCE_RESULTS.append((number, description, passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, description, passed, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(
            f"[{status}] criterion {number:2d}: {description} ({detail})")


@pytest.fixture(scope="session")
def baseline_params():
    return ProtocolParams()


@pytest.fixture(scope="session")
def baseline_traj(baseline_params):
    return evolve_schrodinger(baseline_params)


@pytest.fixture(scope="session")
def baseline_adiabatic(baseline_params):
    return evolve_adiabatic(baseline_params)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
