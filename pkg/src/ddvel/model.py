"""Robot parameters, torque modes and exact propagation of the reduced dynamics.

The reduced state is (v, theta, omega): forward speed error, heading error and
angular velocity. Under saturated torques the dynamics split into four modes.
The two "beta" modes push both wheels the same way and only change v. The two
"alpha" modes push the wheels in opposite directions and only change omega.
Every mode is a constant acceleration, so propagation is done in closed form.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Optional


class InvalidParams(ValueError):
    pass


@dataclass(frozen=True)
class RobotParams:
    r: float = 1.0  # wheel radius
    b: float = 5.0  # half wheel base
    m: float = 3.0
    J_r: float = 1.2
    u_m: float = 1.0  # torque bound per motor
    phi_dot_max: float = 0.5  # wheel speed bound
    c1: float = 1.0
    c2: float = 0.5
    # Optional direct overrides of the acceleration rates.
    alpha: Optional[float] = None
    beta: Optional[float] = None

    def validate(self) -> "RobotParams":
        for name in ("r", "b", "m", "J_r", "u_m", "phi_dot_max"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise InvalidParams(f"{name} must be finite and > 0, got {val}")
        if not self.c1 > 0:
            raise InvalidParams(f"c1 must be > 0, got {self.c1}")
        if not self.c2 >= 0:
            raise InvalidParams(f"c2 must be >= 0, got {self.c2}")
        if self.c1 == self.c2:
            raise InvalidParams("c1 and c2 must differ")
        for name in ("alpha", "beta"):
            val = getattr(self, name)
            if val is not None and not (math.isfinite(val) and val > 0):
                raise InvalidParams(f"{name} override must be finite and > 0, got {val}")
        return self


@dataclass(frozen=True)
class DerivedRates:
    alpha: float  # angular acceleration under an alpha mode
    beta: float  # linear acceleration under a beta mode
    v_max: float
    omega_max: float


def derive_rates(params: RobotParams) -> DerivedRates:
    params.validate()
    alpha = 4 * params.r * params.u_m / (params.J_r * params.b)
    beta = 2 * params.r * params.u_m / params.m
    if params.alpha is not None:
        alpha = params.alpha
    if params.beta is not None:
        beta = params.beta
    return DerivedRates(
        alpha=alpha,
        beta=beta,
        v_max=params.r * params.phi_dot_max,
        omega_max=params.r / params.b * params.phi_dot_max,
    )


def rates_from(alpha: float, beta: float, v_max: float = math.inf,
               omega_max: float = math.inf) -> DerivedRates:
    """Build rates directly, for synthesis work that needs nothing else."""
    if not (alpha > 0 and beta > 0):
        raise InvalidParams(f"alpha and beta must be > 0, got {alpha}, {beta}")
    return DerivedRates(alpha=float(alpha), beta=float(beta),
                        v_max=float(v_max), omega_max=float(omega_max))


_PARAM_KEYS = {f.name for f in fields(RobotParams)}


def params_from_mapping(data: dict) -> RobotParams:
    unknown = set(data) - _PARAM_KEYS
    if unknown:
        raise InvalidParams(f"unknown parameter keys: {sorted(unknown)}")
    kwargs = {k: (None if v is None else float(v)) for k, v in data.items()}
    return RobotParams(**kwargs).validate()


def load_params(path: str | Path) -> RobotParams:
    """Read RobotParams from a YAML or JSON file.

    The file is a flat mapping with any of the keys r, b, m, J_r, u_m,
    phi_dot_max, c1, c2, alpha, beta. Missing keys keep their defaults.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        data = json.loads(text)
    else:
        import yaml

        data = yaml.safe_load(text) or {}
    if not isinstance(data, dict):
        raise InvalidParams(f"{path}: expected a mapping of parameters")
    return params_from_mapping(data)


class TorquePhase(enum.Enum):
    BetaPlus = "BetaPlus"
    BetaMinus = "BetaMinus"
    AlphaPlus = "AlphaPlus"
    AlphaMinus = "AlphaMinus"

    @property
    def is_alpha(self) -> bool:
        return self in (TorquePhase.AlphaPlus, TorquePhase.AlphaMinus)

    @property
    def sign(self) -> int:
        return 1 if self in (TorquePhase.AlphaPlus, TorquePhase.BetaPlus) else -1

    @property
    def opposite(self) -> "TorquePhase":
        return phase_of(self.is_alpha, -self.sign)


def phase_of(is_alpha: bool, sign: float) -> TorquePhase:
    if sign > 0:
        return TorquePhase.AlphaPlus if is_alpha else TorquePhase.BetaPlus
    return TorquePhase.AlphaMinus if is_alpha else TorquePhase.BetaMinus


# (sign of u1, sign of u2) for each mode
_TORQUE_SIGNS = {
    TorquePhase.BetaPlus: (1, 1),
    TorquePhase.BetaMinus: (-1, -1),
    TorquePhase.AlphaPlus: (1, -1),
    TorquePhase.AlphaMinus: (-1, 1),
}


def phase_torques(phase: TorquePhase, params: RobotParams) -> tuple[float, float]:
    s1, s2 = _TORQUE_SIGNS[phase]
    return s1 * params.u_m, s2 * params.u_m


def phase_from_torques(u1: float, u2: float) -> Optional[TorquePhase]:
    if u1 == 0 and u2 == 0:
        return None
    key = (int(math.copysign(1, u1)), int(math.copysign(1, u2)))
    for phase, signs in _TORQUE_SIGNS.items():
        if signs == key:
            return phase
    raise ValueError(f"not a saturated torque pair: {(u1, u2)}")


@dataclass(frozen=True)
class ReducedState:
    v: float
    theta: float  # unwrapped
    omega: float

    def __post_init__(self):
        for name in ("v", "theta", "omega"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.v, self.theta, self.omega)

    def is_finite(self) -> bool:
        return all(math.isfinite(c) for c in self.as_tuple())


ORIGIN = ReducedState(0.0, 0.0, 0.0)


def weighted_distance(a: ReducedState, b: ReducedState, rates: DerivedRates) -> float:
    """max(|dv|/beta, |dtheta|, |domega|/alpha), the norm used for target balls."""
    return max(abs(a.v - b.v) / rates.beta, abs(a.theta - b.theta),
               abs(a.omega - b.omega) / rates.alpha)


def step_phase(q: ReducedState, phase: TorquePhase, dt: float,
               rates: DerivedRates) -> ReducedState:
    if dt < 0:
        raise ValueError(f"dt must be >= 0, got {dt}")
    s = phase.sign
    if phase.is_alpha:
        acc = s * rates.alpha
        return ReducedState(q.v, q.theta + q.omega * dt + 0.5 * acc * dt * dt,
                            q.omega + acc * dt)
    return ReducedState(q.v + s * rates.beta * dt, q.theta + q.omega * dt, q.omega)


class PlanKind(enum.Enum):
    C1ns = "C1ns"
    C2a = "C2a"
    C2b = "C2b"
    Boundary = "Boundary"
    Empty = "Empty"


@dataclass(frozen=True)
class PhasePlan:
    phases: tuple[tuple[TorquePhase, float], ...] = ()
    kind: PlanKind = PlanKind.Empty

    def __post_init__(self):
        if len(self.phases) > 3:
            raise ValueError("a plan has at most 3 phases")
        for _, d in self.phases:
            if not d >= 0:
                raise ValueError(f"negative phase duration {d}")
        for (a, _), (b, _) in zip(self.phases, self.phases[1:]):
            if a == b:
                raise ValueError("consecutive phases must differ")

    @property
    def total_time(self) -> float:
        return math.fsum(d for _, d in self.phases)

    @property
    def first_phase(self) -> Optional[TorquePhase]:
        return self.phases[0][0] if self.phases else None

    def durations(self) -> list[float]:
        return [d for _, d in self.phases]


def make_plan(pairs: Iterable[tuple[TorquePhase, float]], kind: PlanKind) -> PhasePlan:
    """Build a plan, dropping zero-length phases and merging equal neighbours."""
    merged: list[list] = []
    for phase, d in pairs:
        if d == 0:
            continue
        if merged and merged[-1][0] == phase:
            merged[-1][1] += d
        else:
            merged.append([phase, d])
    if not merged:
        return PhasePlan((), PlanKind.Empty)
    return PhasePlan(tuple((p, d) for p, d in merged), kind)


def propagate(q: ReducedState, plan: PhasePlan, rates: DerivedRates) -> ReducedState:
    for phase, d in plan.phases:
        q = step_phase(q, phase, d, rates)
    return q


def state_at(q: ReducedState, plan: PhasePlan, t: float,
             rates: DerivedRates) -> ReducedState:
    """State reached after running the plan for time t (held at the end)."""
    elapsed = 0.0
    for phase, d in plan.phases:
        if t <= elapsed + d:
            return step_phase(q, phase, max(t - elapsed, 0.0), rates)
        q = step_phase(q, phase, d, rates)
        elapsed += d
    return q
