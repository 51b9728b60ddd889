"""Candidate table for steering to a nonzero angular velocity.

Lists all nine three-phase candidates for the two worked examples, marks the
feasible ones, and cross-checks the best against the brute-force oracle.
"""
import argparse
import math

from ddvel import ReducedState, RobotParams, derive_rates
from ddvel.oracle import brute_force_min_time, default_spec
from ddvel.synthesis import plan_nonzero_target

EXAMPLES = [((3.0, -math.pi, 2.0), 2.4), ((-1.0, -math.pi, 4.0), 4.4)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--skip-oracle", action="store_true")
    args = ap.parse_args()
    rates = derive_rates(RobotParams())
    for q0, wd in EXAMPLES:
        q0 = ReducedState(*q0)
        cs = plan_nonzero_target(q0, wd, rates)
        print(f"\nq0={q0.as_tuple()} omega_d={wd}")
        print(f"{'family':14s} {'signs':12s} {'t1':>10s} {'t2':>10s} {'t3':>10s} {'total':>10s} feasible")
        for i, c in enumerate(cs.candidates):
            mark = "*" if i in cs.best_indices else ""
            print(f"{c.family:14s} {str(c.signs):12s} "
                  + " ".join(f"{d:10.4f}" for d in c.durations)
                  + f" {c.total_time:10.4f} {c.feasible}{mark}")
        print(f"feasible: {len(cs.feasible)}  optimal: {len(cs.best_indices)}")
        if not args.skip_oracle:
            res = brute_force_min_time(q0, default_spec(q0, rates, ReducedState(0, 0, wd)), rates)
            print(f"oracle: {res.time:.12f}  analytic: {cs.best.total_time:.12f}  "
                  f"grid step {res.grid_step:.1e}")


if __name__ == "__main__":
    main()
