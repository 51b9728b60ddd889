"""Closed-form extremal plans and time-optimal plan selection.

Each planner returns a PhasePlan that drives the reduced state to the origin
(or, for the nonzero-target enumeration, to (0, 0, omega_d)), or None when its
family has no positive-duration member from the given state.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from .model import (
    DerivedRates,
    PhasePlan,
    PlanKind,
    ReducedState,
    TorquePhase,
    make_plan,
    phase_of,
    propagate,
)
from .regions import (
    AmbiguousRegion,
    Region,
    RegionLabel,
    Tolerance,
    classify,
    h1,
    h2,
    in_omega3,
)


class InternalInconsistency(RuntimeError):
    pass


class NoCandidate(RuntimeError):
    pass


class Flavor(enum.Enum):
    """Which three-phase family covers Omega4.

    G1 starts with a beta phase and leaves Omega4 through H1 = 0.
    G2 starts with an alpha phase and leaves Omega4 through H2 = 0.
    """

    G1 = "g1"
    G2 = "g2"


def sgn(x: float) -> int:
    return int(x > 0) - int(x < 0)


def _alpha(s: float) -> TorquePhase:
    return phase_of(True, s)


def _beta(s: float) -> TorquePhase:
    return phase_of(False, s)


def _positive(*ds: float) -> bool:
    # also rejects inf/nan from dividing by a subnormal omega or v
    return all(math.isfinite(d) and d > 0 for d in ds)


def plan_w0_zero(v0: float, theta0: float, rates: DerivedRates) -> PhasePlan:
    """Optimal plan from a state with zero angular velocity."""
    a, b = rates.alpha, rates.beta
    t2 = abs(v0) / b
    s1 = -sgn(theta0)
    t1 = math.sqrt(a * a * v0 * v0 / (b * b) + 4 * a * abs(theta0)) / (2 * a) - abs(v0) / (2 * b)
    if theta0 == 0 or t1 < 0:  # t1 < 0 only from roundoff at tiny |theta0|
        t1 = 0.0
    # total is 2*t1 + t2 = sqrt(a^2 v0^2/b^2 + 4a|theta0|)/a, not half of that
    kind = PlanKind.C2a if theta0 != 0 else PlanKind.Boundary
    return make_plan([(_alpha(s1), t1), (_beta(-sgn(v0)), t2), (_alpha(-s1), t1)], kind)


def _c2a_durations(q: ReducedState, rates: DerivedRates, s1: int):
    a, b = rates.alpha, rates.beta
    disc = 2 * q.omega ** 2 + a * a * q.v * q.v / (b * b) - 4 * s1 * a * q.theta
    if disc < 0:
        return None
    # The root whose last alpha phase has length (sqrt(disc) - a|v|/b)/(2a).
    # The other root makes that phase negative for either s1.
    t3 = (math.sqrt(disc) - a * abs(q.v) / b) / (2 * a)
    t1 = t3 - s1 * q.omega / a
    return t1, abs(q.v) / b, t3


def plan_c2a(q: ReducedState, rates: DerivedRates) -> Optional[PhasePlan]:
    """Alpha, beta, alpha with the two alpha phases opposite (Omega1, Omega2)."""
    a_, b_ = h1(q, rates), h2(q, rates)
    if a_ < 0 and b_ < 0:
        s1 = 1
    elif a_ > 0 and b_ > 0:
        s1 = -1
    else:
        return None
    durs = _c2a_durations(q, rates, s1)
    if durs is None:
        return None
    t1, t2, t3 = durs
    if not _positive(t1, t3):
        return None
    return make_plan([(_alpha(s1), t1), (_beta(-sgn(q.v)), t2), (_alpha(-s1), t3)],
                     PlanKind.C2a)


def _c2b_s3(t1: float, v: float, rates: DerivedRates) -> int:
    # both signs work when t1 > |v|/beta; the one against v is faster
    if v == 0:
        return 1
    return -sgn(v) if t1 > abs(v) / rates.beta else sgn(v)


def plan_c2b(q: ReducedState, rates: DerivedRates) -> Optional[PhasePlan]:
    """Beta, alpha, beta with opposite beta phases, from the Omega3 predicate."""
    if not in_omega3(q, rates):
        return None
    a, b = rates.alpha, rates.beta
    t1 = -h1(q, rates) / (2 * a * q.omega)
    t2 = abs(q.omega) / a
    s3 = _c2b_s3(t1, q.v, rates)
    t3 = q.v / (s3 * b) + t1
    if not _positive(t1, t2, t3):
        return None
    return make_plan([(_beta(s3), t1), (_alpha(-sgn(q.omega)), t2), (_beta(-s3), t3)],
                     PlanKind.C2b)


def _in_omega4(q: ReducedState, rates: DerivedRates) -> bool:
    return h1(q, rates) * h2(q, rates) < 0


def plan_c1ns_bab(q: ReducedState, rates: DerivedRates) -> Optional[PhasePlan]:
    if not _in_omega4(q, rates) or q.omega == 0:
        return None
    a, b = rates.alpha, rates.beta
    t1 = -h1(q, rates) / (2 * a * q.omega)
    t2 = abs(q.omega) / a
    t3 = abs(q.v) / b - t1
    if not _positive(t1, t2, t3):
        return None
    s3 = -sgn(q.v)
    return make_plan([(_beta(s3), t1), (_alpha(-sgn(q.omega)), t2), (_beta(s3), t3)],
                     PlanKind.C1ns)


def plan_c1ns_aba(q: ReducedState, rates: DerivedRates) -> Optional[PhasePlan]:
    if not _in_omega4(q, rates) or q.v == 0 or q.omega == 0:
        return None
    a, b = rates.alpha, rates.beta
    t2 = abs(q.v) / b
    t1 = abs(q.omega) * b / (a * abs(q.v)) * (h2(q, rates) / q.omega)
    t3 = abs(q.omega) / a - t1
    if not _positive(t1, t2, t3):
        return None
    s1 = -sgn(q.omega)
    return make_plan([(_alpha(s1), t1), (_beta(-sgn(q.v)), t2), (_alpha(s1), t3)],
                     PlanKind.C1ns)


def plan_boundary(q: ReducedState, rates: DerivedRates, label: RegionLabel,
                  tol: Tolerance = Tolerance()) -> Optional[PhasePlan]:
    """Plans for states on the switching surfaces."""
    try:
        actual = classify(q, rates, tol)
    except AmbiguousRegion:
        return None
    if actual.region != label.region:
        return None
    a, b = rates.alpha, rates.beta
    alpha_leg = (_alpha(-sgn(q.omega)), abs(q.omega) / a)
    beta_leg = (_beta(-sgn(q.v)), abs(q.v) / b)
    if label.region is Region.S5:
        legs = [alpha_leg, beta_leg]
    elif label.region is Region.S6:
        legs = [beta_leg, alpha_leg]
    elif label.region is Region.Lv:
        legs = [beta_leg]
    elif label.region is Region.Lomega:
        legs = [alpha_leg]
    else:
        return None
    return make_plan(legs, PlanKind.Boundary)


def plan_optimal(q: ReducedState, rates: DerivedRates, tol: Tolerance = Tolerance(),
                 flavor: Flavor = Flavor.G1) -> PhasePlan:
    label = classify(q, rates, tol)
    region = label.region
    if region is Region.Origin:
        return PhasePlan()
    if region in (Region.Omega1, Region.Omega2):
        plan = plan_c2a(q, rates)
    elif region is Region.Omega4:
        plan = plan_c1ns_bab(q, rates) if flavor is Flavor.G1 else plan_c1ns_aba(q, rates)
    else:
        plan = plan_boundary(q, rates, label, tol)
    if plan is None:
        raise InternalInconsistency(f"no plan for {q} classified as {label}")
    return plan


@dataclass(frozen=True)
class DurationSummary:
    c2a: Optional[float]
    c2b_literal: Optional[float]  # -2 theta/omega + |v|/beta, the s3 = sign(v) branch
    c2b_planned: Optional[float]  # total of plan_c2b, which takes the faster s3
    c1ns: Optional[float]


def duration_formulas(q: ReducedState, rates: DerivedRates,
                      tol: Tolerance = Tolerance()) -> DurationSummary:
    a, b = rates.alpha, rates.beta
    c2a = None
    if plan_c2a(q, rates) is not None:
        root = math.sqrt(2 * q.omega ** 2 - 4 * sgn(-h1(q, rates)) * a * q.theta
                         + a * a * q.v * q.v / (b * b))
        c2a = -sgn(-h1(q, rates)) * q.omega / a + root / a
    c2b_lit = c2b_plan = None
    if in_omega3(q, rates):
        c2b_lit = -2 * q.theta / q.omega + abs(q.v) / b
        p = plan_c2b(q, rates)
        c2b_plan = p.total_time if p is not None else None
    c1ns = None
    try:
        region = classify(q, rates, tol).region
    except AmbiguousRegion:
        region = None
    if region in (Region.Omega4, Region.S5, Region.S6, Region.Lv, Region.Lomega):
        c1ns = abs(q.v) / b + abs(q.omega) / a
    return DurationSummary(c2a, c2b_lit, c2b_plan, c1ns)


# Nonzero angular velocity target


@dataclass(frozen=True)
class Candidate:
    family: str  # "aba-opposite", "aba-same" or "bab"
    signs: tuple[int, ...]
    durations: Optional[tuple[float, float, float]]  # None when the formula is undefined
    phases: tuple[TorquePhase, TorquePhase, TorquePhase]
    feasible: bool = False
    plan: Optional[PhasePlan] = None

    @property
    def total_time(self) -> Optional[float]:
        return None if self.durations is None else math.fsum(self.durations)


@dataclass(frozen=True)
class CandidateSet:
    candidates: tuple[Candidate, ...]
    best_indices: tuple[int, ...]

    @property
    def feasible(self) -> list[Candidate]:
        return [c for c in self.candidates if c.feasible]

    @property
    def best(self) -> Candidate:
        return self.candidates[self.best_indices[0]]


def _aba_opposite(q: ReducedState, wd: float, rates: DerivedRates):
    a, b = rates.alpha, rates.beta
    w, av = q.omega, abs(q.v)
    t2 = av / b
    out = []
    for s1 in (1, -1):
        disc = 2 * w * w + 2 * wd * wd + a * a * av * av / (b * b) - 4 * s1 * a * q.theta
        for root in (1, -1):
            phases = (_alpha(s1), _beta(-sgn(q.v) or 1), _alpha(-s1))
            if disc < 0:
                out.append(("aba-opposite", (s1, root), None, phases))
                continue
            sq = root * math.sqrt(disc)
            t1 = (-(2 * w + s1 * a * av / b) + sq) / (2 * s1 * a)
            t3 = (-(2 * wd + s1 * a * av / b) + sq) / (2 * s1 * a)
            out.append(("aba-opposite", (s1, root), (t1, t2, t3), phases))
    return out


def _aba_same(q: ReducedState, wd: float, rates: DerivedRates):
    a, b = rates.alpha, rates.beta
    w, av = q.omega, abs(q.v)
    s1 = sgn(wd - w) or 1
    phases = (_alpha(s1), _beta(-sgn(q.v) or 1), _alpha(s1))
    if av == 0:
        return [("aba-same", (s1,), None, phases)]
    t1 = b * (w * w - wd * wd) / (2 * a * a * av) - q.theta * b / (s1 * a * av) - w / (s1 * a)
    t3 = b * (wd * wd - w * w) / (2 * a * a * av) + q.theta * b / (s1 * a * av) + wd / (s1 * a)
    return [("aba-same", (s1,), (t1, av / b, t3), phases)]


def _bab(q: ReducedState, wd: float, rates: DerivedRates):
    a, b = rates.alpha, rates.beta
    w, v, th = q.omega, q.v, q.theta
    s5 = sgn(wd - w) or 1
    t2 = (wd - w) / (s5 * a)
    shared = (w * w - wd * wd) / (2 * s5 * a) - th
    out = []
    for s4 in (1, -1):
        for s6 in (1, -1):
            phases = (_beta(s4), _alpha(s5), _beta(s6))
            d1 = w - (s4 / s6) * wd
            d3 = wd - (s6 / s4) * w
            if d1 == 0 or d3 == 0:
                out.append(("bab", (s4, s5, s6), None, phases))
                continue
            t1 = (wd * v / (s6 * b) + shared) / d1
            t3 = (w * v / (s4 * b) + shared) / d3
            out.append(("bab", (s4, s5, s6), (t1, t2, t3), phases))
    return out


def _family_kind(phases) -> PlanKind:
    # equal outer signs keep one motor fixed
    if phases[0].sign == phases[2].sign:
        return PlanKind.C1ns
    return PlanKind.C2a if phases[0].is_alpha else PlanKind.C2b


def plan_nonzero_target(q0: ReducedState, omega_d: float, rates: DerivedRates,
                        rel_tie: float = 1e-9, reach_tol: float = 1e-9) -> CandidateSet:
    """Enumerate the nine three-phase extremals that reach (0, 0, omega_d).

    Each candidate is kept in the returned set; the feasible ones have all
    durations non-negative and reach the target under exact propagation.
    """
    raw = _aba_opposite(q0, omega_d, rates) + _aba_same(q0, omega_d, rates) + _bab(q0, omega_d, rates)
    scale = max(1.0, abs(q0.v), abs(q0.theta), abs(q0.omega), abs(omega_d))
    target = ReducedState(0.0, 0.0, omega_d)
    cands = []
    for family, signs, durs, phases in raw:
        feasible, plan = False, None
        if durs is not None and all(math.isfinite(d) for d in durs):
            if min(durs) >= -1e-12 * scale:
                clean = tuple(max(d, 0.0) for d in durs)
                plan = make_plan(zip(phases, clean), _family_kind(phases))
                end = propagate(q0, plan, rates)
                err = max(abs(end.v - target.v), abs(end.theta - target.theta),
                          abs(end.omega - target.omega))
                feasible = err <= reach_tol * scale
                durs = clean
        cands.append(Candidate(family, signs, durs, phases, feasible, plan if feasible else None))
    feas = [i for i, c in enumerate(cands) if c.feasible]
    if not feas:
        raise NoCandidate(f"none of the nine extremals reach omega_d={omega_d} from {q0}")
    tmin = min(cands[i].total_time for i in feas)
    best = tuple(i for i in feas
                 if cands[i].total_time - tmin <= rel_tie * max(tmin, 1e-300) or cands[i].total_time == tmin)
    return CandidateSet(tuple(cands), best)
