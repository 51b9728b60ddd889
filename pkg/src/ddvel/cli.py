"""Command line interface.

    ddvel plan --v 1 --theta 4 --omega -2
    ddvel classify --v 0 --theta 0 --omega 0
    ddvel simulate --v 1 --theta 4 --omega -2 --feedback --out traj.csv
    ddvel track --controller hybrid --ref-file ref.csv --out track.csv
    ddvel oracle-check --v 3 --theta -3.14159265 --omega 2 --omega-d 2.4
    ddvel sweep --n 200 --seed 1 --out sweep.csv
    ddvel surface-dump --out-dir surfaces/

Exit codes: 0 success, 1 domain error, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .feedback import u_fb
from .model import (
    InvalidParams,
    PhasePlan,
    PlanKind,
    ReducedState,
    RobotParams,
    TorquePhase,
    derive_rates,
    load_params,
    make_plan,
    propagate,
)
from .oracle import Unreachable, brute_force_min_time, default_spec
from .regions import AmbiguousRegion, Tolerance, classify, h1, h2
from .sim import (
    CONTROLLERS,
    PoseState,
    fmt,
    load_reference_csv,
    simulate_feedback,
    simulate_kinematic,
    simulate_open_loop,
    weighted_norm,
)
from .synthesis import Flavor, InternalInconsistency, NoCandidate, plan_nonzero_target, plan_optimal

OUTPUT_DIR_ENV = "DDVEL_OUTPUT_DIR"

DOMAIN_ERRORS = (Unreachable, NoCandidate, InternalInconsistency, AmbiguousRegion,
                 InvalidParams, FileNotFoundError)


class DomainError(RuntimeError):
    pass


@dataclass(frozen=True)
class RunConfig:
    params: RobotParams
    params_path: Optional[Path]
    out_dir: Path
    seed: int

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        path = Path(args.config) if args.config else None
        params = load_params(path) if path else RobotParams()
        out = args.out_dir or os.environ.get(OUTPUT_DIR_ENV) or "."
        return cls(params, path, Path(out), args.seed)

    def out_path(self, name: str) -> Path:
        p = Path(name)
        if not p.is_absolute():
            p = self.out_dir / p
        p.parent.mkdir(parents=True, exist_ok=True)
        return p


def _state(args) -> ReducedState:
    return ReducedState(args.v, args.theta, args.omega)


def _emit(lines: list[str], cfg: RunConfig, out: Optional[str]) -> None:
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if out:
        cfg.out_path(out).write_text(text)


def plan_lines(plan: PhasePlan) -> list[str]:
    lines = [f"kind,{plan.kind.value}"]
    lines += [f"{p.value},{fmt(d)}" for p, d in plan.phases]
    lines.append(f"total,{fmt(plan.total_time)}")
    return lines


def read_plan(path: Path) -> PhasePlan:
    """Parse the text written by `plan` back into a PhasePlan."""
    kind = PlanKind.Empty
    pairs = []
    for raw in path.read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, val = line.partition(",")
        if key == "kind":
            kind = PlanKind(val)
        elif key == "total":
            continue
        else:
            pairs.append((TorquePhase(key), float(val)))
    return make_plan(pairs, kind)


def cmd_plan(args, cfg: RunConfig) -> int:
    rates = derive_rates(cfg.params)
    q = _state(args)
    if args.omega_d is None:
        if args.all_candidates:
            raise DomainError("--all-candidates needs --omega-d")
        _emit(plan_lines(plan_optimal(q, rates, Tolerance(), Flavor(args.flavor))), cfg, args.out)
        return 0
    cs = plan_nonzero_target(q, args.omega_d, rates)
    if not args.all_candidates:
        _emit(plan_lines(cs.best.plan), cfg, args.out)
        return 0
    lines = ["index,family,signs,phase1,t1,phase2,t2,phase3,t3,total,feasible,best"]
    for i, c in enumerate(cs.candidates):
        durs = c.durations or (float("nan"),) * 3
        cells = [str(i), c.family, " ".join(f"{s:+d}" for s in c.signs)]
        for p, d in zip(c.phases, durs):
            cells += [p.value, fmt(d)]
        total = c.total_time if c.durations is not None else float("nan")
        cells += [fmt(total), str(c.feasible).lower(), str(i in cs.best_indices).lower()]
        lines.append(",".join(cells))
    _emit(lines, cfg, args.out)
    return 0


def cmd_classify(args, cfg: RunConfig) -> int:
    rates = derive_rates(cfg.params)
    q = _state(args)
    label = classify(q, rates, Tolerance(args.eps))
    print(str(label))
    print(f"H1,{fmt(h1(q, rates))}")
    print(f"H2,{fmt(h2(q, rates))}")
    return 0


def cmd_feedback(args, cfg: RunConfig) -> int:
    rates = derive_rates(cfg.params)
    q = _state(args)
    cmd = u_fb(q, rates, cfg.params, Flavor(args.flavor))
    print(f"u1,{fmt(cmd.u1)}")
    print(f"u2,{fmt(cmd.u2)}")
    print(f"label,{classify(q, rates)}")
    return 0


def cmd_simulate(args, cfg: RunConfig) -> int:
    rates = derive_rates(cfg.params)
    q = _state(args)
    if args.feedback:
        traj = simulate_feedback(q, Flavor(args.flavor), rates, cfg.params, dt=args.dt,
                                 t_max=args.t_max)
    else:
        if args.plan_file:
            plan = read_plan(Path(args.plan_file))
        else:
            plan = plan_optimal(q, rates, Tolerance(), Flavor(args.flavor))
        traj = simulate_open_loop(q, plan, rates, args.sample_dt, cfg.params)
    if args.out:
        traj.write_csv(cfg.out_path(args.out))
    t, v, th, w = traj.final[:4]
    print(f"t_end,{fmt(t)}")
    print(f"final,{fmt(v)},{fmt(th)},{fmt(w)}")
    if traj.exit_surface:
        print(f"omega4_exit,{traj.exit_surface}")
    if not traj.converged:
        print("did not converge", file=sys.stderr)
        return 1
    return 0


def cmd_track(args, cfg: RunConfig) -> int:
    rates = derive_rates(cfg.params)
    ref = load_reference_csv(args.ref_file)
    traj = simulate_kinematic(PoseState(args.x0, args.y0, args.theta0), args.controller, ref,
                              cfg.params, rates, dt=args.dt, t_max=args.t_max,
                              k_omega=args.k_omega, theta_tol=args.theta_tol)
    if args.out:
        traj.write_csv(cfg.out_path(args.out))
    print(f"t_end,{fmt(traj.final[0])}")
    print(f"theta,{fmt(traj.final[3])}")
    print(f"heading_error,{fmt(traj.heading_error[-1])}")
    return 0


def cmd_oracle_check(args, cfg: RunConfig) -> int:
    rates = derive_rates(cfg.params)
    q = _state(args)
    if args.omega_d is None:
        target = ReducedState(0.0, 0.0, 0.0)
        analytic = plan_optimal(q, rates).total_time
    else:
        target = ReducedState(0.0, 0.0, args.omega_d)
        analytic = plan_nonzero_target(q, args.omega_d, rates).best.total_time
    res = brute_force_min_time(q, default_spec(q, rates, target, n_grid=args.n_grid), rates)
    gap = abs(res.time - analytic)
    print(f"analytic,{fmt(analytic)}")
    print(f"oracle,{fmt(res.time)}")
    print(f"gap,{fmt(gap)}")
    print(f"grid_step,{fmt(res.grid_step)}")
    print(f"within_resolution,{str(gap <= res.grid_step).lower()}")
    return 0 if gap <= res.grid_step else 1


SWEEP_COLUMNS = ("index", "v", "theta", "omega", "region", "kind", "total",
                 "endpoint_error", "closed_loop_time", "converged")


def _sweep_one(i, q, rates, params, closed_loop, dt):
    plan = plan_optimal(q, rates)
    err = weighted_norm(propagate(q, plan, rates), rates)
    row = [str(i), fmt(q.v), fmt(q.theta), fmt(q.omega), str(classify(q, rates)),
           plan.kind.value, fmt(plan.total_time), fmt(err)]
    if closed_loop:
        tr = simulate_feedback(q, Flavor.G1, rates, params, dt=dt)
        row += [fmt(tr.final[0]), str(tr.converged).lower()]
    else:
        row += ["", ""]
    return row


def cmd_sweep(args, cfg: RunConfig) -> int:
    rates = derive_rates(cfg.params)
    rng = np.random.default_rng(cfg.seed)
    states = [ReducedState(*rng.uniform(-args.box, args.box, 3)) for _ in range(args.n)]
    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        rows = list(pool.map(lambda iq: _sweep_one(iq[0], iq[1], rates, cfg.params,
                                                   args.closed_loop, args.dt),
                             enumerate(states)))
    out = cfg.out_path(args.out)
    with out.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        w.writerows(rows)
    worst = max(float(r[7]) for r in rows) if rows else 0.0
    print(f"states,{len(rows)}")
    print(f"worst_endpoint_error,{fmt(worst)}")
    failed = sum(1 for r in rows if r[9] == "false")
    if args.closed_loop:
        print(f"not_converged,{failed}")
    return 1 if failed else 0


def cmd_surface_dump(args, cfg: RunConfig) -> int:
    alpha, beta = args.alpha, args.beta
    vs = np.linspace(-args.v_range, args.v_range, args.n)
    ws = np.linspace(-args.omega_range, args.omega_range, args.n)
    V, W = np.meshgrid(vs, ws, indexing="ij")
    th1 = -W * np.abs(W) / (2 * alpha)
    th2 = th1 - W * np.abs(V) / beta
    for name, th in (("h1_zero.csv", th1), ("h2_zero.csv", th2)):
        path = cfg.out_path(name)
        with path.open("w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(("v", "theta", "omega"))
            for v, t, om in zip(V.ravel(), th.ravel(), W.ravel()):
                w.writerow((fmt(v), fmt(t), fmt(om)))
        print(f"wrote,{path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML or JSON file with robot parameters")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out-dir", help=f"output directory (default ${OUTPUT_DIR_ENV} or .)")
    common.add_argument("--verbose", action="store_true")

    state = argparse.ArgumentParser(add_help=False)
    state.add_argument("--v", type=float, required=True, help="forward speed error")
    state.add_argument("--theta", type=float, required=True, help="heading error, rad, unwrapped")
    state.add_argument("--omega", type=float, required=True, help="angular velocity")

    flavor = argparse.ArgumentParser(add_help=False)
    flavor.add_argument("--flavor", choices=[f.value for f in Flavor], default="g1")

    parser = argparse.ArgumentParser(prog="ddvel", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", parents=[common, state, flavor], help="optimal phase plan")
    p.add_argument("--omega-d", type=float)
    p.add_argument("--all-candidates", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("classify", parents=[common, state], help="region label and H values")
    p.add_argument("--eps", type=float, default=Tolerance().eps_surface)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("feedback", parents=[common, state, flavor], help="feedback torques")
    p.set_defaults(func=cmd_feedback)

    p = sub.add_parser("simulate", parents=[common, state, flavor], help="torque-level simulation")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--plan-file")
    mode.add_argument("--feedback", action="store_true")
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--sample-dt", type=float, default=1e-2)
    p.add_argument("--t-max", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("track", parents=[common], help="kinematic velocity tracking")
    p.add_argument("--controller", choices=CONTROLLERS, required=True)
    p.add_argument("--ref-file", required=True, help="CSV with columns t,vdx,vdy")
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--y0", type=float, default=0.0)
    p.add_argument("--theta0", type=float, default=0.0)
    p.add_argument("--dt", type=float, default=1e-2)
    p.add_argument("--t-max", type=float, default=60.0)
    p.add_argument("--k-omega", type=float, default=1.0)
    p.add_argument("--theta-tol", type=float, default=1e-3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("oracle-check", parents=[common, state], help="brute-force cross-check")
    p.add_argument("--omega-d", type=float)
    p.add_argument("--n-grid", type=int, default=60)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("sweep", parents=[common], help="seeded batch of random states")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--box", type=float, default=5.0)
    p.add_argument("--closed-loop", action="store_true")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--out", default="sweep.csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("surface-dump", parents=[common], help="H1=0 and H2=0 point grids")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--n", type=int, default=41)
    p.add_argument("--v-range", type=float, default=2.0)
    p.add_argument("--omega-range", type=float, default=2.0)
    p.set_defaults(func=cmd_surface_dump)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig.from_args(args)
        return args.func(args, cfg)
    except (DomainError, ValueError, *DOMAIN_ERRORS) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
