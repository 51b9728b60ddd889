"""Brute-force minimum-time search over three-phase bang-bang controls.

This module deliberately shares nothing with the synthesis code except the
state and phase types. It restates the constant-acceleration dynamics over
numpy arrays, sweeps every duration triple on a grid for all 36 phase
sequences, and refines the promising grid minima by zooming in.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.ndimage import minimum_filter
from scipy.optimize import least_squares

from .model import (
    DerivedRates,
    PhasePlan,
    PlanKind,
    ReducedState,
    TorquePhase,
    make_plan,
    propagate,
    weighted_distance,
)


class Unreachable(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleSpec:
    t_upper: float
    n_grid: int = 60
    target_tol: float = 1e-3  # weighted norm
    target: ReducedState = ReducedState(0.0, 0.0, 0.0)
    rounds: int = 3
    zoom: int = 10
    polish: bool = True

    def __post_init__(self):
        if not self.t_upper > 0:
            raise ValueError("t_upper must be > 0")
        if self.n_grid < 2:
            raise ValueError("n_grid must be >= 2")
        if not self.target_tol > 0:
            raise ValueError("target_tol must be > 0")


def default_horizon(q0: ReducedState, rates: DerivedRates,
                    target: ReducedState = ReducedState(0.0, 0.0, 0.0)) -> float:
    dv, dth, dw = q0.v - target.v, q0.theta - target.theta, q0.omega - target.omega
    return 2 * (abs(dv) / rates.beta + abs(dw) / rates.alpha
                + 2 * math.sqrt(abs(dth) / rates.alpha) + 1)


def default_spec(q0: ReducedState, rates: DerivedRates,
                 target: ReducedState = ReducedState(0.0, 0.0, 0.0), **kw) -> OracleSpec:
    return OracleSpec(t_upper=default_horizon(q0, rates, target), target=target, **kw)


@dataclass(frozen=True)
class OracleResult:
    time: float
    plan: PhasePlan
    grid_step: float  # step of the last refinement grid
    residual: float  # weighted endpoint distance of the returned plan


SEQUENCES = [s for s in itertools.product(TorquePhase, repeat=3) if s[0] != s[1] and s[1] != s[2]]


def _step(v, th, w, phase: TorquePhase, t, rates: DerivedRates):
    s = phase.sign
    if phase.is_alpha:
        acc = s * rates.alpha
        return v, th + w * t + 0.5 * acc * t * t, w + acc * t
    return v + s * rates.beta * t, th + w * t, w


def _endpoints(q0: ReducedState, seq, g1, g2, g3, rates):
    """Endpoint arrays on the outer product grid g1 x g2 x g3."""
    v, th, w = _step(q0.v, q0.theta, q0.omega, seq[0], g1[:, None, None], rates)
    v, th, w = _step(v, th, w, seq[1], g2[None, :, None], rates)
    return _step(v, th, w, seq[2], g3[None, None, :], rates)


def _residuals(end, target: ReducedState, rates: DerivedRates):
    ev = np.abs(end[0] - target.v) / rates.beta
    et = np.abs(end[1] - target.theta)
    ew = np.abs(end[2] - target.omega) / rates.alpha
    return ev * ev + et * et + ew * ew, np.maximum(np.maximum(ev, et), ew)


def _axis(center: float, half: float, step: float, upper: float) -> np.ndarray:
    lo = max(center - half, 0.0)
    hi = min(center + half, upper)
    n = int(round((hi - lo) / step)) + 1
    return np.minimum(lo + step * np.arange(n), upper)


def _refine(q0, seq, start, h, spec: OracleSpec, rates):
    c = np.asarray(start, dtype=float)
    for _ in range(spec.rounds):
        half = 2 * h
        h = h / spec.zoom
        axes = [_axis(ci, half, h, spec.t_upper) for ci in c]
        sq, _ = _residuals(_endpoints(q0, seq, *axes, rates), spec.target, rates)
        i, j, k = np.unravel_index(np.argmin(sq), sq.shape)
        c = np.array([axes[0][i], axes[1][j], axes[2][k]])
    return c, h


def _polish(q0, seq, durs, spec: OracleSpec, rates):
    """Bounded least-squares solve from the refined grid point.

    The grid has already picked the sequence and basin; this only removes the
    lattice quantization of the final point.
    """
    def resid(t):
        end = _endpoints(q0, seq, t[:1], t[1:2], t[2:], rates)
        return np.array([(float(np.squeeze(end[0])) - spec.target.v) / rates.beta,
                         float(np.squeeze(end[1])) - spec.target.theta,
                         (float(np.squeeze(end[2])) - spec.target.omega) / rates.alpha])

    sol = least_squares(resid, durs, bounds=(0.0, spec.t_upper), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    if np.max(np.abs(sol.fun)) < np.max(np.abs(resid(durs))):
        return np.clip(sol.x, 0.0, spec.t_upper)
    return durs


def _kind_of(plan: PhasePlan) -> PlanKind:
    """Family a plan belongs to, judged from its phase pattern alone."""
    ph = [p for p, _ in plan.phases]
    if not ph:
        return PlanKind.Empty
    if len(ph) < 3:
        return PlanKind.Boundary
    a, b, c = ph
    if a.is_alpha == c.is_alpha and a.is_alpha != b.is_alpha:
        if a.sign == c.sign:
            return PlanKind.C1ns
        return PlanKind.C2a if a.is_alpha else PlanKind.C2b
    return PlanKind.Boundary


def brute_force_min_time(q0: ReducedState, spec: OracleSpec, rates: DerivedRates) -> OracleResult:
    n = spec.n_grid
    g = np.linspace(0.0, spec.t_upper, n)
    h0 = g[1] - g[0]
    seeds = []
    for seq in SEQUENCES:
        sq, mx = _residuals(_endpoints(q0, seq, g, g, g, rates), spec.target, rates)
        is_min = minimum_filter(sq, size=3, mode="nearest") == sq
        for i, j, k in zip(*np.nonzero(is_min)):
            seeds.append((g[i] + g[j] + g[k], float(mx[i, j, k]), seq, (g[i], g[j], g[k])))
    seeds.sort(key=lambda s: s[0])

    best: Optional[OracleResult] = None
    # A refined point stays within 2*h0 of its seed on every axis.
    slack = 6 * h0
    for coarse_total, _, seq, start in seeds:
        if best is not None and coarse_total - slack > best.time:
            break
        durs, h = _refine(q0, seq, start, h0, spec, rates)
        if spec.polish:
            durs = _polish(q0, seq, durs, spec, rates)
        plan = make_plan(zip(seq, (float(d) for d in durs)), PlanKind.Boundary)
        plan = PhasePlan(plan.phases, _kind_of(plan))
        res = weighted_distance(propagate(q0, plan, rates), spec.target, rates)
        if res > spec.target_tol:
            continue
        total = float(np.sum(durs))
        if best is None or total < best.time:
            best = OracleResult(total, plan, h, res)
    if best is None:
        raise Unreachable(f"no grid plan reaches {spec.target} from {q0} within t_upper={spec.t_upper}")
    return best


def verify_plan(q0: ReducedState, plan: PhasePlan, target: ReducedState, tol: float,
                rates: DerivedRates) -> bool:
    """True iff every duration is non-negative and the plan ends within tol of target.

    The distance is the plain max over the three components.
    """
    if any(d < 0 for d in plan.durations()):
        return False
    end = propagate(q0, plan, rates)
    return max(abs(end.v - target.v), abs(end.theta - target.theta),
               abs(end.omega - target.omega)) <= tol
