"""Time-optimal velocity control for a differential drive robot."""

from .model import (
    DerivedRates,
    PhasePlan,
    PlanKind,
    ReducedState,
    RobotParams,
    TorquePhase,
    derive_rates,
    phase_torques,
    step_phase,
)

__all__ = [
    "DerivedRates",
    "PhasePlan",
    "PlanKind",
    "ReducedState",
    "RobotParams",
    "TorquePhase",
    "derive_rates",
    "phase_torques",
    "step_phase",
]
