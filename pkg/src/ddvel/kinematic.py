"""Velocity tracking when the wheel speeds themselves are the inputs.

The robot can only realize (v, omega) pairs inside the diamond
|v|/r + b|omega|/r <= phi_dot_max. Commands outside it are clipped per wheel,
which can stall rotation entirely. The prioritized command keeps the rotation
and gives up forward speed instead.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .model import DerivedRates, RobotParams


@dataclass(frozen=True)
class WheelCommand:
    phi_dot_R: float
    phi_dot_L: float


@dataclass(frozen=True)
class VelocityCommand:
    v: float
    omega: float


@dataclass(frozen=True)
class HeadingRef:
    theta_d: float
    v_d_mag: float

    def __post_init__(self):
        if self.v_d_mag < 0:
            raise ValueError("v_d_mag must be >= 0")


class HybridMode(enum.Enum):
    BangBang = "BangBang"
    Continuous = "Continuous"


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    w = math.remainder(a, 2 * math.pi)
    return math.pi if w == -math.pi else w


def heading_error(theta: float, theta_d: float) -> float:
    return wrap_angle(theta - theta_d)


def continuous_cmd(theta: float, ref: HeadingRef, k_omega: float, saturate_speed: bool,
                   rates: DerivedRates) -> VelocityCommand:
    if not k_omega > 0:
        raise ValueError("k_omega must be > 0")
    e = heading_error(theta, ref.theta_d)
    speed = min(ref.v_d_mag, rates.v_max) if saturate_speed else ref.v_d_mag
    return VelocityCommand(speed * math.cos(e), -k_omega * e)


def wheels_from_vw(cmd: VelocityCommand, params: RobotParams) -> WheelCommand:
    return WheelCommand((cmd.v + params.b * cmd.omega) / params.r,
                        (cmd.v - params.b * cmd.omega) / params.r)


def _clamp(x: float, lim: float) -> float:
    return max(-lim, min(lim, x))


def saturate_wheels(w: WheelCommand, params: RobotParams) -> WheelCommand:
    lim = params.phi_dot_max
    return WheelCommand(_clamp(w.phi_dot_R, lim), _clamp(w.phi_dot_L, lim))


def vw_from_wheels(w: WheelCommand, params: RobotParams) -> VelocityCommand:
    return VelocityCommand(params.r * (w.phi_dot_R + w.phi_dot_L) / 2,
                           params.r * (w.phi_dot_R - w.phi_dot_L) / (2 * params.b))


def diamond_load(cmd: VelocityCommand, params: RobotParams) -> float:
    """|v|/r + b|omega|/r, which must not exceed phi_dot_max."""
    return abs(cmd.v) / params.r + params.b * abs(cmd.omega) / params.r


def prioritized_cmd(v: float, omega_d: float, params: RobotParams,
                    rates: DerivedRates) -> VelocityCommand:
    omega = _clamp(omega_d, rates.omega_max)
    if abs(v) / params.r + params.b * abs(omega_d) / params.r > params.phi_dot_max:
        v = math.copysign(max(0.0, rates.v_max - params.b * abs(omega_d)), v)
    return VelocityCommand(v, omega)


def bang_bang_heading(theta: float, theta_d: float, rates: DerivedRates) -> VelocityCommand:
    e = wrap_angle(theta_d - theta)
    if e == 0:
        return VelocityCommand(0.0, 0.0)
    return VelocityCommand(0.0, math.copysign(rates.omega_max, e))


def hybrid_cmd(theta: float, ref: HeadingRef, mode: HybridMode, k_omega: float,
               params: RobotParams, rates: DerivedRates,
               theta_tol: float = 1e-3) -> tuple[VelocityCommand, HybridMode]:
    """Turn at full rate until the heading matches, then track continuously.

    The switch to Continuous is latched: it never goes back.
    """
    if mode is HybridMode.BangBang and abs(heading_error(theta, ref.theta_d)) > theta_tol:
        return bang_bang_heading(theta, ref.theta_d, rates), mode
    cont = continuous_cmd(theta, ref, k_omega, True, rates)
    return prioritized_cmd(cont.v, cont.omega, params, rates), HybridMode.Continuous
