import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ddvel.model import (
    InvalidParams,
    PhasePlan,
    PlanKind,
    ReducedState,
    RobotParams,
    TorquePhase,
    derive_rates,
    load_params,
    make_plan,
    phase_from_torques,
    phase_torques,
    propagate,
    rates_from,
    state_at,
    step_phase,
)

finite = st.floats(-50, 50, allow_nan=False)
durations = st.floats(0, 10, allow_nan=False)
phases = st.sampled_from(list(TorquePhase))
states = st.builds(ReducedState, finite, finite, finite)
rate_values = st.floats(0.1, 5)


def close(a: ReducedState, b: ReducedState, tol: float) -> bool:
    scale = max(1.0, *map(abs, a.as_tuple()), *map(abs, b.as_tuple()))
    return all(abs(x - y) <= tol * scale for x, y in zip(a.as_tuple(), b.as_tuple()))


def test_figure_speed_limits():
    rates = derive_rates(RobotParams(r=1, b=5, phi_dot_max=0.5))
    assert rates.v_max == pytest.approx(0.5)
    assert rates.omega_max == pytest.approx(0.1)


def test_unit_rates_from_substitution():
    rates = derive_rates(RobotParams(r=1, b=1, m=2, J_r=4, u_m=1))
    assert rates.alpha == pytest.approx(1.0)
    assert rates.beta == pytest.approx(1.0)


def test_default_params_give_two_thirds():
    rates = derive_rates(RobotParams())
    assert rates.alpha == pytest.approx(2 / 3)
    assert rates.beta == pytest.approx(2 / 3)


@pytest.mark.parametrize("bad", [dict(u_m=0), dict(r=-1), dict(c1=0.5, c2=0.5),
                                 dict(c2=-1), dict(b=math.inf), dict(alpha=0.0)])
def test_invalid_params_rejected(bad):
    with pytest.raises(InvalidParams):
        derive_rates(RobotParams(**bad))


def test_rate_overrides_take_precedence():
    rates = derive_rates(RobotParams(alpha=0.5, beta=1.0))
    assert (rates.alpha, rates.beta) == (0.5, 1.0)


def test_load_params_yaml_and_json(tmp_path):
    (tmp_path / "p.yaml").write_text("r: 1\nb: 5\nalpha: 0.5\n")
    (tmp_path / "p.json").write_text('{"m": 2, "J_r": 4, "b": 1}')
    assert derive_rates(load_params(tmp_path / "p.yaml")).alpha == 0.5
    assert derive_rates(load_params(tmp_path / "p.json")).alpha == pytest.approx(1.0)
    (tmp_path / "bad.yaml").write_text("wheel: 3\n")
    with pytest.raises(InvalidParams):
        load_params(tmp_path / "bad.yaml")


@pytest.mark.parametrize("phase,u_m,expected", [
    (TorquePhase.AlphaPlus, 2, (2, -2)),
    (TorquePhase.BetaMinus, 2, (-2, -2)),
    (TorquePhase.BetaPlus, 0.5, (0.5, 0.5)),
    (TorquePhase.AlphaMinus, 1, (-1, 1)),
])
def test_phase_torques_table(phase, u_m, expected):
    assert phase_torques(phase, RobotParams(u_m=u_m)) == expected
    assert phase_from_torques(*expected) is phase


def test_step_examples():
    r = rates_from(1, 1)
    assert step_phase(ReducedState(0, 0, 0), TorquePhase.AlphaPlus, 1, r) == ReducedState(0, 0.5, 1)
    assert step_phase(ReducedState(1, 0, 0), TorquePhase.BetaMinus, 1, r) == ReducedState(0, 0, 0)
    q = step_phase(ReducedState(0, -1, 0), TorquePhase.AlphaPlus, 1, r)
    assert step_phase(q, TorquePhase.AlphaMinus, 1, r) == ReducedState(0, 0, 0)


def test_negative_dt_rejected():
    with pytest.raises(ValueError):
        step_phase(ReducedState(0, 0, 0), TorquePhase.BetaPlus, -1e-3, rates_from(1, 1))


@given(states, phases, durations, durations, rate_values, rate_values)
def test_semigroup(q, phase, t1, t2, a, b):
    r = rates_from(a, b)
    once = step_phase(q, phase, t1 + t2, r)
    twice = step_phase(step_phase(q, phase, t1, r), phase, t2, r)
    assert close(once, twice, 1e-12)


@given(states, phases, durations, rate_values, rate_values)
def test_modes_leave_the_other_rate_untouched(q, phase, dt, a, b):
    out = step_phase(q, phase, dt, rates_from(a, b))
    if phase.is_alpha:
        assert out.v == q.v
    else:
        assert out.omega == q.omega


@given(states, phases, durations, rate_values, rate_values)
def test_time_reversal_restores_speeds(q, phase, dt, a, b):
    r = rates_from(a, b)
    back = step_phase(step_phase(q, phase, dt, r), phase.opposite, dt, r)
    scale = max(1.0, abs(q.v), abs(q.omega), a * dt, b * dt)
    assert abs(back.v - q.v) <= 1e-15 * 4 * scale
    assert abs(back.omega - q.omega) <= 1e-15 * 4 * scale


def test_plan_invariants():
    with pytest.raises(ValueError):
        PhasePlan(((TorquePhase.BetaPlus, 1.0), (TorquePhase.BetaPlus, 1.0)), PlanKind.C1ns)
    with pytest.raises(ValueError):
        PhasePlan(((TorquePhase.BetaPlus, -1.0),), PlanKind.C1ns)
    plan = make_plan([(TorquePhase.AlphaPlus, 0.0), (TorquePhase.BetaMinus, 2.0),
                      (TorquePhase.BetaMinus, 1.0)], PlanKind.C2a)
    assert plan.phases == ((TorquePhase.BetaMinus, 3.0),)
    assert make_plan([], PlanKind.C2a).kind is PlanKind.Empty


def test_state_at_matches_propagate():
    r = rates_from(1, 1)
    q = ReducedState(2, 0.6, -1)
    plan = PhasePlan(((TorquePhase.BetaMinus, 0.1), (TorquePhase.AlphaPlus, 1.0),
                      (TorquePhase.BetaMinus, 1.9)), PlanKind.C1ns)
    assert state_at(q, plan, plan.total_time + 5, r) == propagate(q, plan, r)
    assert state_at(q, plan, 0.0, r) == q
