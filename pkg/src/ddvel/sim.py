"""Open-loop, closed-loop and kinematic simulation.

Torque simulations step the reduced state with the exact per-phase formulas.
The closed loop holds the feedback torque over each step and locates sign
changes of H1, H2, v and omega by bisection, so switches happen on the
surfaces rather than at the next grid point. Kinematic runs integrate the
planar pose with classical RK4.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .kinematic import (
    HeadingRef,
    HybridMode,
    VelocityCommand,
    continuous_cmd,
    heading_error,
    hybrid_cmd,
    prioritized_cmd,
    saturate_wheels,
    vw_from_wheels,
    wheels_from_vw,
)
from .model import (
    DerivedRates,
    PhasePlan,
    ReducedState,
    RobotParams,
    TorquePhase,
    phase_torques,
    state_at,
    step_phase,
)
from .regions import Region, Tolerance, classify, h1, h2
from .synthesis import Flavor, plan_optimal

log = logging.getLogger(__name__)

TORQUE_COLUMNS = ("t", "v", "theta", "omega", "u1", "u2")
KINEMATIC_COLUMNS = ("t", "x", "y", "theta", "v", "omega", "phiR", "phiL")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass
class Trajectory:
    columns: tuple[str, ...]
    rows: list[tuple[float, ...]] = field(default_factory=list)
    events: list[tuple[float, str]] = field(default_factory=list)
    converged: bool = True
    exit_surface: Optional[str] = None  # set when a closed loop leaves Omega4
    heading_error: list[float] = field(default_factory=list)

    def array(self) -> np.ndarray:
        return np.asarray(self.rows, dtype=float).reshape(-1, len(self.columns))

    def column(self, name: str) -> np.ndarray:
        return self.array()[:, self.columns.index(name)]

    @property
    def final(self) -> tuple[float, ...]:
        return self.rows[-1]

    def write_csv(self, path: str | Path, events_path: str | Path | None = None) -> None:
        path = Path(path)
        with path.open("w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(self.columns)
            for row in self.rows:
                w.writerow([fmt(x) for x in row])
        if events_path is None:
            events_path = path.with_name(path.stem + "_events.csv")
        with Path(events_path).open("w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(("t", "event"))
            for t, desc in self.events:
                w.writerow((fmt(t), desc))


def _torques(phase: Optional[TorquePhase], params: RobotParams) -> tuple[float, float]:
    if phase is None:
        return 0.0, 0.0
    return phase_torques(phase, params)


def simulate_open_loop(q0: ReducedState, plan: PhasePlan, rates: DerivedRates,
                       sample_dt: float = 1e-2, params: RobotParams = RobotParams()) -> Trajectory:
    if not sample_dt > 0:
        raise ValueError("sample_dt must be > 0")
    traj = Trajectory(TORQUE_COLUMNS)
    t0, q = 0.0, q0
    for phase, d in plan.phases:
        u = _torques(phase, params)
        traj.events.append((t0, f"start {phase.value}"))
        k = math.floor(t0 / sample_dt) + 1
        traj.rows.append((t0, *q.as_tuple(), *u))
        while k * sample_dt < t0 + d:
            tk = k * sample_dt
            if tk > t0:
                traj.rows.append((tk, *step_phase(q, phase, tk - t0, rates).as_tuple(), *u))
            k += 1
        q = step_phase(q, phase, d, rates)
        t0 += d
    traj.rows.append((t0, *q.as_tuple(), 0.0, 0.0))
    if plan.phases:
        traj.events.append((t0, "end"))
    return traj


def weighted_norm(q: ReducedState, rates: DerivedRates) -> float:
    return max(abs(q.v) / rates.beta, abs(q.theta), abs(q.omega) / rates.alpha)


_EVENT_NAMES = ("H1", "H2", "v", "omega")


def _event_values(q: ReducedState, rates: DerivedRates) -> tuple[float, float, float, float]:
    return h1(q, rates), h2(q, rates), q.v, q.omega


def _exit_name(region: Region, idx: Optional[int]) -> str:
    if idx is not None and idx < 2:
        return f"{_EVENT_NAMES[idx]}=0"
    return {Region.S5: "H1=0", Region.S6: "H2=0"}.get(region, region.value)


def _bisect(q, phase, rates, idx, g0, h, tol):
    lo, hi = 0.0, h
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        g = _event_values(step_phase(q, phase, mid, rates), rates)[idx]
        if (g > 0) == (g0 > 0) and g != 0:
            lo = mid
        else:
            hi = mid
    return hi


def simulate_feedback(q0: ReducedState, flavor: Flavor, rates: DerivedRates,
                      params: RobotParams, dt: float = 1e-4, t_max: Optional[float] = None,
                      chatter_eps: float = 1e-7, term_tol: float = 1e-6,
                      tol: Tolerance = Tolerance(), event_tol: float = 1e-12) -> Trajectory:
    """Closed loop under the feedback law, stepped exactly with zero-order hold.

    A sign change of H1, H2, v or omega inside a step is located by bisection
    and the law is re-evaluated there. Surfaces the state sits on after such an
    event are ignored for event detection until the state leaves their band,
    and while it slides along one of them within chatter_eps the previous
    torque is held instead of re-evaluating the law.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")
    if t_max is None:
        t_max = 2 * plan_optimal(q0, rates, tol, flavor).total_time + 1.0

    def law(q):
        return plan_optimal(q, rates, tol, flavor).first_phase

    traj = Trajectory(TORQUE_COLUMNS)
    t, q = 0.0, q0
    region = classify(q, rates, tol).region
    phase = law(q)
    traj.rows.append((t, *q.as_tuple(), *_torques(phase, params)))
    if phase is not None:
        traj.events.append((t, f"start {phase.value} in {region.value}"))
    scale = max(1.0, abs(q0.v), abs(q0.theta), abs(q0.omega))
    bands = (chatter_eps, chatter_eps, 1e-12 * scale, 1e-12 * scale)
    g = _event_values(q, rates)
    ignored = {i for i in range(4) if abs(g[i]) <= bands[i]}

    while weighted_norm(q, rates) >= term_tol:
        if t >= t_max or phase is None:
            traj.converged = False
            log.warning("closed loop from %s did not converge by t=%g", q0, t)
            break
        h = min(dt, t_max - t)
        g0 = _event_values(q, rates)
        g1 = _event_values(step_phase(q, phase, h, rates), rates)
        hits = [(_bisect(q, phase, rates, i, g0[i], h, event_tol), i) for i in range(4)
                if i not in ignored and g0[i] != 0 and (g1[i] == 0 or (g1[i] > 0) != (g0[i] > 0))]
        if hits:
            tau, idx = min(hits)
            q = step_phase(q, phase, tau, rates)
            t += tau
            new_phase = law(q)
            new_region = classify(q, rates, tol).region
            traj.events.append((t, f"{_EVENT_NAMES[idx]}=0"))
            g = _event_values(q, rates)
            ignored = {i for i in range(4) if abs(g[i]) <= bands[i]} | {idx}
        else:
            q = step_phase(q, phase, h, rates)
            t += h
            g = _event_values(q, rates)
            ignored = {i for i in ignored if abs(g[i]) <= bands[i]}
            idx = None
            if ignored & {0, 1}:
                new_phase, new_region = phase, region
            else:
                new_phase = law(q)
                new_region = classify(q, rates, tol).region
        if region is Region.Omega4 and new_region is not Region.Omega4 and traj.exit_surface is None:
            traj.exit_surface = _exit_name(new_region, idx)
            traj.events.append((t, f"leave Omega4 via {traj.exit_surface}"))
        region = new_region
        if new_phase != phase:
            traj.events.append((t, f"switch to {new_phase.value if new_phase else 'zero'}"))
        phase = new_phase
        traj.rows.append((t, *q.as_tuple(), *_torques(phase, params)))
    if traj.converged:
        # at rest inside the termination ball, nothing is applied
        traj.rows[-1] = (*traj.rows[-1][:4], 0.0, 0.0)
    return traj


def open_loop_gap(closed: Trajectory, q0: ReducedState, plan: PhasePlan,
                  rates: DerivedRates) -> float:
    """Sup over closed-loop sample times of the max-abs state difference to the plan."""
    worst = 0.0
    for row in closed.rows:
        ref = state_at(q0, plan, row[0], rates)
        worst = max(worst, abs(row[1] - ref.v), abs(row[2] - ref.theta), abs(row[3] - ref.omega))
    return worst


# Kinematic tracking


@dataclass(frozen=True)
class PoseState:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0
    v: float = 0.0
    omega: float = 0.0


Reference = Callable[[float], tuple[float, float]]


def constant_reference(vdx: float, vdy: float) -> Reference:
    return lambda t: (vdx, vdy)


def sampled_reference(ts: Sequence[float], vdx: Sequence[float], vdy: Sequence[float]) -> Reference:
    """Piecewise-constant reference holding each sample until the next one."""
    ts = np.asarray(ts, dtype=float)
    if ts.ndim != 1 or len(ts) == 0 or np.any(np.diff(ts) <= 0):
        raise ValueError("reference times must be non-empty and strictly increasing")
    vx, vy = np.asarray(vdx, dtype=float), np.asarray(vdy, dtype=float)

    def ref(t: float) -> tuple[float, float]:
        i = max(int(np.searchsorted(ts, t, side="right")) - 1, 0)
        return float(vx[i]), float(vy[i])

    return ref


def load_reference_csv(path: str | Path) -> Reference:
    with Path(path).open(newline="") as f:
        rows = list(csv.DictReader(f))
    missing = {"t", "vdx", "vdy"} - set(rows[0] if rows else {})
    if missing:
        raise ValueError(f"{path}: reference CSV needs columns t, vdx, vdy (missing {sorted(missing)})")
    return sampled_reference([float(r["t"]) for r in rows], [float(r["vdx"]) for r in rows],
                             [float(r["vdy"]) for r in rows])


CONTROLLERS = ("continuous", "saturated", "modified", "hybrid")


def _pose_rate(state, v, omega):
    _, _, th = state
    return np.array([v * math.cos(th), v * math.sin(th), omega])


def rk4_pose(x: float, y: float, theta: float, v: float, omega: float, dt: float):
    s = np.array([x, y, theta])
    k1 = _pose_rate(s, v, omega)
    k2 = _pose_rate(s + 0.5 * dt * k1, v, omega)
    k3 = _pose_rate(s + 0.5 * dt * k2, v, omega)
    k4 = _pose_rate(s + dt * k3, v, omega)
    return s + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def simulate_kinematic(pose0: PoseState, controller: str, ref: Reference, params: RobotParams,
                       rates: DerivedRates, dt: float = 1e-2, t_max: float = 60.0,
                       k_omega: float = 1.0, theta_tol: float = 1e-3) -> Trajectory:
    if not dt > 0:
        raise ValueError("dt must be > 0")
    if controller not in CONTROLLERS:
        raise ValueError(f"unknown controller {controller!r}; choose from {CONTROLLERS}")
    traj = Trajectory(KINEMATIC_COLUMNS)
    x, y, th = pose0.x, pose0.y, pose0.theta
    mode = HybridMode.BangBang
    prev_theta_d = None
    warned = False
    n = int(round(t_max / dt))
    for k in range(n + 1):
        t = k * dt
        vdx, vdy = ref(t)
        mag = math.hypot(vdx, vdy)
        # with no desired velocity there is no heading to track
        theta_d = math.atan2(vdy, vdx) if mag > 0 else th
        if prev_theta_d is not None and not warned:
            rate = abs(heading_error(theta_d, prev_theta_d)) / dt
            if rate >= rates.omega_max and mag > 0:
                log.warning("reference heading turns at %.3g rad/s >= omega_max at t=%g", rate, t)
                warned = True
        prev_theta_d = theta_d
        href = HeadingRef(theta_d, mag)
        if controller == "continuous":
            cmd = continuous_cmd(th, href, k_omega, False, rates)
        elif controller == "saturated":
            cmd = continuous_cmd(th, href, k_omega, True, rates)
        elif controller == "modified":
            c = continuous_cmd(th, href, k_omega, True, rates)
            cmd = prioritized_cmd(c.v, c.omega, params, rates)
        else:
            prev_mode = mode
            cmd, mode = hybrid_cmd(th, href, mode, k_omega, params, rates, theta_tol)
            if mode is not prev_mode:
                traj.events.append((t, "latch Continuous"))
        wheels = saturate_wheels(wheels_from_vw(cmd, params), params)
        real = vw_from_wheels(wheels, params)
        traj.rows.append((t, x, y, th, real.v, real.omega, wheels.phi_dot_R, wheels.phi_dot_L))
        traj.heading_error.append(heading_error(th, theta_d))
        if k < n:
            x, y, th = (float(c) for c in rk4_pose(x, y, th, real.v, real.omega, dt))
    return traj
