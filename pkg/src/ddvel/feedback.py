"""State feedback torque laws built from the optimal planner."""
from __future__ import annotations

from dataclasses import dataclass

from .model import DerivedRates, ReducedState, RobotParams, phase_torques
from .regions import Tolerance
from .synthesis import Flavor, plan_optimal


@dataclass(frozen=True)
class TorqueCommand:
    u1: float  # right wheel
    u2: float  # left wheel


def u_fb(q: ReducedState, rates: DerivedRates, params: RobotParams,
         flavor: Flavor = Flavor.G1, tol: Tolerance = Tolerance()) -> TorqueCommand:
    """Torques of the first phase of the optimal plan from q, or zero at the origin."""
    phase = plan_optimal(q, rates, tol, flavor).first_phase
    if phase is None:
        return TorqueCommand(0.0, 0.0)
    return TorqueCommand(*phase_torques(phase, params))
