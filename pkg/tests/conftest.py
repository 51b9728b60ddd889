import os
from pathlib import Path

import pytest
import yaml
from hypothesis import HealthCheck, settings

from ddvel.model import ReducedState, RobotParams, derive_rates, rates_from

settings.register_profile("default", max_examples=200, deadline=None)
settings.register_profile("ci", max_examples=1000, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = Path(__file__).parent / "fixtures"

_ACCEPTANCE: dict[str, str] = {}


@pytest.fixture
def unit_rates():
    return rates_from(1.0, 1.0)


@pytest.fixture
def fig_params():
    # alpha = beta = 2/3, v_max = 0.5, omega_max = 0.1
    return RobotParams()


@pytest.fixture
def fig_rates(fig_params):
    return derive_rates(fig_params)


@pytest.fixture(scope="session")
def feedback_ics():
    data = yaml.safe_load((FIXTURES / "feedback_ics.yaml").read_text())
    return [(ic["name"], ic["region"], ReducedState(*ic["state"]))
            for ic in data["initial_conditions"]]


@pytest.fixture
def acceptance():
    """Record one summary line per acceptance criterion."""
    def record(key: str, passed: bool, detail: str) -> None:
        _ACCEPTANCE[key] = f"{'PASS' if passed else 'FAIL'}  criterion {key}: {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: int(k)):
        terminalreporter.write_line(_ACCEPTANCE[key])
