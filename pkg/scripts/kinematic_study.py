"""Wheel-speed saturation study: heading under the four tracking controllers.

Runs the constant reference v_d = (0, 5) and the ramp v_d = (1, 1 + t) and
writes one CSV per run.
"""
import argparse
import math
from pathlib import Path

import numpy as np

from ddvel import RobotParams, derive_rates
from ddvel.sim import CONTROLLERS, PoseState, constant_reference, simulate_kinematic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="out/kinematic")
    ap.add_argument("--t-max", type=float, default=60.0)
    ap.add_argument("--dt", type=float, default=1e-2)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params = RobotParams()
    rates = derive_rates(params)
    refs = {"constant": constant_reference(0.0, 5.0), "ramp": lambda t: (1.0, 1.0 + t)}
    print("reference,controller,final_theta,final_abs_error,mean_abs_error_after_10s")
    for rname, ref in refs.items():
        for ctl in CONTROLLERS:
            traj = simulate_kinematic(PoseState(), ctl, ref, params, rates, dt=args.dt,
                                      t_max=args.t_max)
            traj.write_csv(out / f"{rname}_{ctl}.csv")
            err = np.abs(traj.heading_error)
            late = err[traj.column("t") >= 10.0]
            print(f"{rname},{ctl},{traj.final[3]:.6f},{err[-1]:.3e},{late.mean():.4f}")
    print(f"\n(target heading for the constant reference is pi/2 = {math.pi / 2:.6f})")


if __name__ == "__main__":
    main()
