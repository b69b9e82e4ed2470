"""Command-line interface: run experiments, regenerate the SI sweep, list presets."""

import argparse
import os
import sys

from .config import dbm_to_watts, load_overrides, apply_overrides
from .errors import CasimError
from .harness import run_experiment
from .scenarios import describe, get_scenario, scenario_names
from .si import sensitivity_degradation
from .svgplot import emit_plot
from .trace import emit_csv


def _cmd_run(args):
    scenario = get_scenario(args.scenario)
    if args.config:
        scenario = apply_overrides(scenario, load_overrides(args.config))
    if args.baseline:
        scenario.baseline = args.baseline.replace("-", "_")
        scenario.validate()
    seed = args.seed
    env_seed = os.environ.get("CA_SIM_SEED")
    if env_seed is not None:
        seed = int(env_seed)
    os.makedirs(args.out_dir, exist_ok=True)
    trace = run_experiment(scenario, seed, episodes=args.episodes)
    stem = f"{scenario.name}_{scenario.baseline}_seed{seed}"
    csv_path = os.path.join(args.out_dir, stem + ".csv")
    emit_csv(trace, csv_path)
    print(csv_path)
    if args.plot:
        svg_path = os.path.join(args.out_dir, stem + ".svg")
        emit_plot(trace, "rate_bps", svg_path)
        print(svg_path)
    return 0


def _cmd_si_sweep(args):
    """SI power (dBm) vs receiver sensitivity degradation (dB) curve."""
    noise = dbm_to_watts(args.noise_dbm)
    lines = ["p_SI_dBm,degradation_dB"]
    dbm = args.start_dbm
    while dbm <= args.stop_dbm + 1e-9:
        deg = sensitivity_degradation(dbm_to_watts(dbm), noise)
        lines.append(f"{dbm:.9g},{deg:.9g}")
        dbm += args.step_db
    with open(args.out, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    print(args.out)
    return 0


def _cmd_list(_args):
    for name in scenario_names():
        print(f"{name:26s} {describe(name)}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="casim",
        description="Uplink carrier-aggregation resource-allocation simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and emit its CSV trace")
    run.add_argument("--scenario", required=True, help="preset name (see list-scenarios)")
    run.add_argument("--config", help="YAML file overriding network/agent fields")
    run.add_argument("--seed", type=int, default=0,
                     help="master seed (CA_SIM_SEED env var wins when set)")
    run.add_argument("--episodes", type=int, default=None,
                     help="override the preset episode count")
    run.add_argument("--out-dir", default="out", help="output directory")
    run.add_argument("--baseline", choices=["era", "ddpg-only", "ha"],
                     help="replace the learner with a baseline policy")
    run.add_argument("--plot", action="store_true",
                     help="also emit an SVG of per-episode mean throughput")
    run.set_defaults(func=_cmd_run)

    sweep = sub.add_parser("si-sweep",
                           help="CSV of sensitivity degradation vs SI power")
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--start-dbm", type=float, default=-130.0)
    sweep.add_argument("--stop-dbm", type=float, default=-80.0)
    sweep.add_argument("--step-db", type=float, default=0.5)
    sweep.add_argument("--noise-dbm", type=float, default=-100.0,
                       help="receiver noise floor")
    sweep.set_defaults(func=_cmd_si_sweep)

    lst = sub.add_parser("list-scenarios", help="print the preset library")
    lst.set_defaults(func=_cmd_list)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CasimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
