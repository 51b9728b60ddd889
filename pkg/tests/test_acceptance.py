"""One test per acceptance criterion.

Each test records a PASS/FAIL line through the `acceptance` fixture, printed in
the terminal summary, and then asserts the same condition.
"""
import math
import time

import numpy as np
import pytest

from ddvel.kinematic import (
    HeadingRef,
    HybridMode,
    VelocityCommand,
    diamond_load,
    hybrid_cmd,
    prioritized_cmd,
    saturate_wheels,
    vw_from_wheels,
    wheels_from_vw,
)
from ddvel.model import ReducedState, RobotParams, derive_rates, propagate
from ddvel.oracle import brute_force_min_time, default_spec
from ddvel.regions import AmbiguousRegion, Region, classify
from ddvel.sim import (
    PoseState,
    constant_reference,
    open_loop_gap,
    simulate_feedback,
    simulate_kinematic,
    simulate_open_loop,
)
from ddvel.synthesis import (
    Flavor,
    duration_formulas,
    plan_c1ns_aba,
    plan_c1ns_bab,
    plan_nonzero_target,
    plan_optimal,
)
from helpers import random_states, sample_c1ns_c2b, sample_c2a_c2b

PARAMS = RobotParams()  # alpha = beta = 2/3
RATES = derive_rates(PARAMS)


def test_criterion_1_figure_state(acceptance):
    start = time.perf_counter()
    q0 = ReducedState(1, 4, -2)
    label = classify(q0, RATES)
    plan = plan_optimal(q0, RATES)
    traj = simulate_open_loop(q0, plan, RATES)
    end_err = max(map(abs, traj.final[1:4]))
    elapsed = time.perf_counter() - start
    ok = (label.region is Region.Omega4 and plan.kind.value == "C1ns" and end_err <= 1e-6
          and abs(plan.total_time - 4.5) <= 1e-9 and elapsed < 1.0)
    acceptance("1", ok, f"label={label} kind={plan.kind.value} total={plan.total_time!r} "
                        f"endpoint={end_err:.2e} runtime={elapsed:.3f}s")
    assert ok


def _count(cs, rel=1e-9):
    feasible = cs.feasible
    best = min(c.total_time for c in feasible)
    tied = [c for c in feasible if abs(c.total_time - best) <= rel * best]
    return len(feasible), len(tied), best


def test_criterion_2_nonzero_target_examples(acceptance):
    start = time.perf_counter()
    n1, tied1, best1 = _count(plan_nonzero_target(ReducedState(3, -math.pi, 2), 2.4, RATES))
    mid = time.perf_counter()
    n2, tied2, best2 = _count(plan_nonzero_target(ReducedState(-1, -math.pi, 4), 4.4, RATES))
    t1, t2 = mid - start, time.perf_counter() - mid
    ok = (n1 == 5 and tied1 == 1 and n2 == 5 and tied2 == 2 and t1 < 1 and t2 < 1)
    acceptance("2", ok, f"example 1: {n1} feasible, {tied1} optimal (T={best1:.6f}); "
                        f"example 2: {n2} feasible, {tied2} optimal (T={best2:.6f}); "
                        f"expected 5/1 and 5/2")
    assert ok


def test_criterion_3_oracle_agreement(acceptance):
    start = time.perf_counter()
    failures, worst = 0, 0.0
    for q0 in random_states(100, seed=2024):
        analytic = plan_optimal(q0, RATES).total_time
        res = brute_force_min_time(q0, default_spec(q0, RATES), RATES)
        gap = abs(res.time - analytic)
        worst = max(worst, gap / res.grid_step)
        failures += gap > res.grid_step
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 600
    acceptance("3", ok, f"{failures} failures on 100 states, worst gap/grid_step={worst:.2e}, "
                        f"runtime={elapsed:.0f}s")
    assert ok


def test_criterion_4_duration_orderings(acceptance):
    c2a_slower = sum(1 for q in sample_c2a_c2b(10_000, RATES)
                 if not duration_formulas(q, RATES).c2a < duration_formulas(q, RATES).c2b_literal)
    # omega*H1 < 0 excludes S5, Lv and Lomega, so the sampler covers Omega4 and S6
    c1ns_slower = sum(1 for q in sample_c1ns_c2b(10_000, RATES)
                  if not duration_formulas(q, RATES).c1ns <= duration_formulas(q, RATES).c2b_literal)
    ok = c2a_slower == 0 and c1ns_slower == 0
    acceptance("4", ok, f"C2a<C2b violations={c2a_slower}/10000, C1ns<=C2b violations={c1ns_slower}/10000")
    assert ok


def _gap(q0, dt):
    traj = simulate_feedback(q0, Flavor.G1, RATES, PARAMS, dt=dt)
    return traj.converged, open_loop_gap(traj, q0, plan_optimal(q0, RATES), RATES)


def test_criterion_5_closed_equals_open_loop(acceptance, feedback_ics):
    dt = 1e-4
    bound_ok, halving_ok, parts = True, True, []
    for name, _, q0 in feedback_ics:
        conv1, g1 = _gap(q0, dt)
        conv2, g2 = _gap(q0, dt / 2)
        bound_ok &= conv1 and conv2 and g1 <= 10 * dt
        # halving: gap(dt)/gap(dt/2) within 25% of 2
        ratio = g1 / g2 if g2 > 0 else math.inf
        halving_ok &= 1.5 <= ratio <= 2.5
        parts.append(f"{name}: {g1:.1e}/{g2:.1e}")
    ok = bound_ok and halving_ok
    acceptance("5", ok, f"gap<=10*dt {'ok' if bound_ok else 'violated'}; halving "
                        f"{'ok' if halving_ok else 'not observed'} (gap dt/gap dt/2: "
                        + ", ".join(parts) + ")")
    assert ok


def test_criterion_6_flavor_exit_surfaces(acceptance):
    q0 = ReducedState(1, 4, -2)
    g1 = simulate_feedback(q0, Flavor.G1, RATES, PARAMS)
    g2 = simulate_feedback(q0, Flavor.G2, RATES, PARAMS)
    ok = (g1.exit_surface == "H1=0" and g2.exit_surface == "H2=0"
          and g1.converged and g2.converged)
    acceptance("6", ok, f"G1 exit {g1.exit_surface} (converged={g1.converged}), "
                        f"G2 exit {g2.exit_surface} (converged={g2.converged})")
    assert ok


def _mean_error(traj, t0=10.0):
    ts = traj.column("t")
    err = np.abs(np.asarray(traj.heading_error))
    return float(err[ts >= t0 - 1e-9].mean())


def test_criterion_7_kinematic_saturation(acceptance):
    final = {}
    for ctl in ("continuous", "saturated", "modified", "hybrid"):
        traj = simulate_kinematic(PoseState(), ctl, constant_reference(0, 5), PARAMS, RATES,
                                  t_max=60.0)
        final[ctl] = abs(traj.final[3] - math.pi / 2)
    ramp = lambda t: (1.0, 1.0 + t)  # noqa: E731
    mean = {ctl: _mean_error(simulate_kinematic(PoseState(), ctl, ramp, PARAMS, RATES, t_max=60.0))
            for ctl in ("continuous", "modified", "hybrid")}
    ok = (final["continuous"] > 0.1
          and all(final[c] <= 1e-3 for c in ("saturated", "modified", "hybrid"))
          and mean["modified"] < mean["continuous"] and mean["hybrid"] < mean["continuous"])
    acceptance("7", ok, "final |theta-pi/2|: " + ", ".join(f"{k}={v:.2e}" for k, v in final.items())
               + "; mean error on [10,60]: " + ", ".join(f"{k}={v:.4f}" for k, v in mean.items()))
    assert ok


def test_criterion_8_property_suites(acceptance):
    rng = np.random.default_rng(8)
    # partition: every sample gets exactly one label
    bad_partition = 0
    for row in rng.uniform(-5, 5, size=(100_000, 3)):
        try:
            classify(ReducedState(*row), RATES)
        except AmbiguousRegion:
            bad_partition += 1
    # plan validity
    worst_end = 0.0
    for q in random_states(10_000, seed=88):
        end = propagate(q, plan_optimal(q, RATES), RATES)
        worst_end = max(worst_end, *map(abs, end.as_tuple()))
    # equal duration of the two Omega4 plans
    worst_eq, n_omega4 = 0.0, 0
    for q in random_states(10_000, seed=89):
        bab, aba = plan_c1ns_bab(q, RATES), plan_c1ns_aba(q, RATES)
        if bab is not None and aba is not None:
            n_omega4 += 1
            worst_eq = max(worst_eq, abs(bab.total_time - aba.total_time) / max(1.0, bab.total_time))
    # feasibility diamond on every kinematic command path
    worst_load = 0.0
    for v, w, th in rng.uniform([-20, -5, -math.pi], [20, 5, math.pi], size=(10_000, 3)):
        raw = VelocityCommand(v, w)
        sat = vw_from_wheels(saturate_wheels(wheels_from_vw(raw, PARAMS), PARAMS), PARAMS)
        pri = prioritized_cmd(v, w, PARAMS, RATES)
        ref = HeadingRef(0.0, abs(v))
        hyb_b, _ = hybrid_cmd(th, ref, HybridMode.BangBang, 1.0, PARAMS, RATES)
        hyb_c, _ = hybrid_cmd(th, ref, HybridMode.Continuous, 1.0, PARAMS, RATES)
        worst_load = max(worst_load, *(diamond_load(c, PARAMS) - PARAMS.phi_dot_max
                                       for c in (sat, pri, hyb_b, hyb_c)))
    ok = (bad_partition == 0 and worst_end <= 1e-9 and n_omega4 > 0 and worst_eq <= 1e-12
          and worst_load <= 1e-12)
    acceptance("8", ok, f"partition failures={bad_partition}/100000, worst endpoint={worst_end:.1e}, "
                        f"Omega4 duration mismatch={worst_eq:.1e} over {n_omega4}, "
                        f"diamond excess={worst_load:.1e}")
    assert ok
