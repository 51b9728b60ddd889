"""Gap between closed-loop feedback and open-loop optimal trajectories versus dt.

Switch times are located by bisection, so the gap sits near roundoff for
every dt instead of shrinking linearly.
"""
import argparse
from pathlib import Path

import yaml

from ddvel import ReducedState, RobotParams, derive_rates
from ddvel.sim import open_loop_gap, simulate_feedback
from ddvel.synthesis import Flavor, plan_optimal

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "feedback_ics.yaml"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dts", type=float, nargs="+", default=[1e-2, 1e-3, 1e-4, 5e-5])
    ap.add_argument("--flavor", choices=[f.value for f in Flavor], default="g1")
    args = ap.parse_args()
    params = RobotParams()
    rates = derive_rates(params)
    ics = yaml.safe_load(FIXTURES.read_text())["initial_conditions"]
    print("name," + ",".join(f"gap@{dt:g}" for dt in args.dts))
    for ic in ics:
        q0 = ReducedState(*ic["state"])
        plan = plan_optimal(q0, rates, flavor=Flavor(args.flavor))
        gaps = [open_loop_gap(simulate_feedback(q0, Flavor(args.flavor), rates, params, dt=dt),
                              q0, plan, rates) for dt in args.dts]
        print(ic["name"] + "," + ",".join(f"{g:.2e}" for g in gaps))


if __name__ == "__main__":
    main()
