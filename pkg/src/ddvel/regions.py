"""Switching surfaces and the region partition of the reduced state space.

H1 = 0 is the set of states that an alpha phase alone can bring to
theta = omega = 0. H2 = 0 is the set that a beta phase followed by an alpha
phase can bring to the origin. Their signs split the space into the open
regions Omega1, Omega2, Omega4, and their zero sets give the boundary pieces.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .model import DerivedRates, ReducedState


class AmbiguousRegion(ValueError):
    """Raised when the tolerance bands make more than one label plausible."""


class Region(enum.Enum):
    Omega1 = "Omega1"
    Omega2 = "Omega2"
    Omega4 = "Omega4"
    S5 = "S5"
    S6 = "S6"
    Lv = "Lv"
    Lomega = "Lomega"
    Origin = "Origin"


_NEEDS_SUB = {Region.Omega4, Region.S5, Region.S6, Region.Lv, Region.Lomega}


@dataclass(frozen=True)
class RegionLabel:
    region: Region
    sub: Optional[str] = None  # "v+", "v-", "w+" or "w-"
    omega_sign: Optional[int] = None  # also kept for Omega4

    def __post_init__(self):
        if (self.sub is not None) != (self.region in _NEEDS_SUB):
            raise ValueError(f"sub refinement mismatch for {self.region}: {self.sub!r}")

    def __str__(self) -> str:
        return self.region.value if self.sub is None else f"{self.region.value}^{self.sub}"


@dataclass(frozen=True)
class Tolerance:
    eps_surface: float = 1e-9

    def __post_init__(self):
        if not self.eps_surface > 0:
            raise ValueError("eps_surface must be > 0")


def h1(q: ReducedState, rates: DerivedRates) -> float:
    return 2 * rates.alpha * q.theta + q.omega * abs(q.omega)


def h2(q: ReducedState, rates: DerivedRates) -> float:
    return (q.omega * abs(q.omega) / (2 * rates.alpha) + q.theta
            + q.omega * abs(q.v) / rates.beta)


def in_omega3(q: ReducedState, rates: DerivedRates) -> bool:
    """omega * H1 < 0. Overlaps the other regions, so it is only a predicate."""
    return q.omega * h1(q, rates) < 0


def _vsub(v: float) -> str:
    return "v+" if v > 0 else "v-"


def _wsub(w: float) -> str:
    return "w+" if w > 0 else "w-"


def classify(q: ReducedState, rates: DerivedRates, tol: Tolerance = Tolerance()) -> RegionLabel:
    eps = tol.eps_surface
    a, b = h1(q, rates), h2(q, rates)
    on1, on2 = abs(a) <= eps, abs(b) <= eps
    if not on1 and not on2:
        if a < 0 and b < 0:
            return RegionLabel(Region.Omega1)
        if a > 0 and b > 0:
            return RegionLabel(Region.Omega2)
        if q.v == 0 or q.omega == 0:
            # opposite H signs force v != 0 and omega != 0 analytically
            raise AmbiguousRegion(f"{q} has H1={a}, H2={b} of opposite sign with v or omega zero")
        return RegionLabel(Region.Omega4, _vsub(q.v), 1 if q.omega > 0 else -1)
    if on1 and not on2:
        if q.omega == 0:
            raise AmbiguousRegion(f"{q} on H1=0 with omega=0 but H2={b}")
        return RegionLabel(Region.S5, _wsub(q.omega))
    if on2 and not on1:
        if q.v == 0:
            raise AmbiguousRegion(f"{q} on H2=0 with v=0 but H1={a}")
        return RegionLabel(Region.S6, _vsub(q.v))

    zv, zt, zw = abs(q.v) <= eps, abs(q.theta) <= eps, abs(q.omega) <= eps
    if zv and zt and zw:
        return RegionLabel(Region.Origin)
    if not zv and zw and zt:
        return RegionLabel(Region.Lv, _vsub(q.v))
    if not zw and zv:
        return RegionLabel(Region.Lomega, _wsub(q.omega))
    raise AmbiguousRegion(
        f"{q} lies within eps={eps} of both surfaces (H1={a}, H2={b}) "
        "but matches none of Origin, Lv, Lomega")
