"""Seeded samplers shared by the property and acceptance tests."""
import numpy as np

from ddvel.model import ReducedState
from ddvel.regions import Region, classify, h1, in_omega3


def random_states(n, seed, box=5.0):
    rng = np.random.default_rng(seed)
    return [ReducedState(*row) for row in rng.uniform(-box, box, size=(n, 3))]


def sample_c2a_c2b(n, rates, seed=11, box=5.0):
    """States in (Omega1 or Omega2) that also satisfy omega*H1 < 0."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        q = ReducedState(*rng.uniform(-box, box, 3))
        if in_omega3(q, rates) and classify(q, rates).region in (Region.Omega1, Region.Omega2):
            out.append(q)
    return out


def sample_c1ns_c2b(n, rates, seed=12, box=5.0):
    """States with omega*H1 < 0 in Omega4, half of them built on H2 = 0 (S6)."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        v, theta, w = rng.uniform(-box, box, 3)
        if len(out) % 2:
            theta = -w * abs(w) / (2 * rates.alpha) - w * abs(v) / rates.beta
        q = ReducedState(v, theta, w)
        region = classify(q, rates).region
        if in_omega3(q, rates) and region in (Region.Omega4, Region.S6):
            out.append(q)
    return out
