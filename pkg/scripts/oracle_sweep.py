"""Compare planner times with the brute-force oracle on seeded random states."""
import argparse
import time

import numpy as np

from ddvel import ReducedState, RobotParams, derive_rates
from ddvel.oracle import brute_force_min_time, default_spec
from ddvel.synthesis import plan_optimal


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--box", type=float, default=5.0)
    ap.add_argument("--n-grid", type=int, default=60)
    args = ap.parse_args()
    rates = derive_rates(RobotParams())
    rng = np.random.default_rng(args.seed)
    print("v,theta,omega,analytic,oracle,gap,grid_step,seconds")
    fails = 0
    for row in rng.uniform(-args.box, args.box, size=(args.n, 3)):
        q0 = ReducedState(*row)
        start = time.perf_counter()
        res = brute_force_min_time(q0, default_spec(q0, rates, n_grid=args.n_grid), rates)
        dt = time.perf_counter() - start
        analytic = plan_optimal(q0, rates).total_time
        gap = res.time - analytic
        fails += abs(gap) > res.grid_step
        print(f"{q0.v:.4f},{q0.theta:.4f},{q0.omega:.4f},{analytic:.9f},{res.time:.9f},"
              f"{gap:.2e},{res.grid_step:.1e},{dt:.2f}")
    print(f"# {fails} of {args.n} outside one grid step")


if __name__ == "__main__":
    main()
