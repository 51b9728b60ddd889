"""Open-loop optimal and closed-loop feedback trajectories for the fixture states.

Writes one CSV per state and flavor into --out-dir and prints the final
state, the total time and the Omega4 exit surface where there is one.
"""
import argparse
from pathlib import Path

import yaml

from ddvel import ReducedState, RobotParams, derive_rates
from ddvel.sim import open_loop_gap, simulate_feedback, simulate_open_loop
from ddvel.synthesis import Flavor, plan_optimal

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "feedback_ics.yaml"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="out/phase")
    ap.add_argument("--dt", type=float, default=1e-3)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params = RobotParams()
    rates = derive_rates(params)
    ics = yaml.safe_load(FIXTURES.read_text())["initial_conditions"]
    print("name,flavor,kind,total,closed_t_end,gap,omega4_exit")
    for ic in ics:
        q0 = ReducedState(*ic["state"])
        for flavor in Flavor:
            plan = plan_optimal(q0, rates, flavor=flavor)
            simulate_open_loop(q0, plan, rates, params=params).write_csv(
                out / f"{ic['name']}_{flavor.value}_open.csv")
            closed = simulate_feedback(q0, flavor, rates, params, dt=args.dt)
            closed.write_csv(out / f"{ic['name']}_{flavor.value}_closed.csv")
            gap = open_loop_gap(closed, q0, plan, rates)
            print(f"{ic['name']},{flavor.value},{plan.kind.value},{plan.total_time:.6f},"
                  f"{closed.final[0]:.6f},{gap:.2e},{closed.exit_surface or ''}")


if __name__ == "__main__":
    main()
