"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

from .config import FIG2_DELTAS, ConfigError, ExperimentConfig, load_config
from .ensemble import (
    ControllerNoise,
    RandomNoise,
    delta_sweep,
    ensemble_runs,
    resolve_workers,
    run_trajectory,
    summarize,
)
from .initial import UniformInit
from .model import SimParams
from .output import (
    render_plot,
    write_control_csv,
    write_metrics_csv,
    write_positions_csv,
    write_summary_csv,
    write_sweep_csv,
)

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3

FIG2_RANGES = (("pi40", math.pi / 40), ("pi80", math.pi / 80))
FIG2_PARAMS = dict(n=5, B=40.0, r=8.0, v=2.0, delta=FIG2_DELTAS[0], horizon=500)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON configuration file")
    common.add_argument("--seed", type=int, help="master seed (overrides the config)")
    common.add_argument("--runs", type=int, help="number of Monte-Carlo runs")
    common.add_argument("--out", help="output path prefix")
    common.add_argument("--threads", type=int, help="worker threads, 0 = one per CPU (env VICSEK_THREADS)")

    parser = _Parser(prog="vicsek", description="Bounded-box Vicsek model simulator")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sim = sub.add_parser("simulate", parents=[common], help="one trajectory to CSV")
    sim.add_argument("--positions", action="store_true", help="also write per-agent positions")
    sub.add_parser("ensemble", parents=[common], help="R runs to a summary CSV (+ SVG)")
    sub.add_parser("sweep", parents=[common], help="plateau of mean d_theta per delta")
    sub.add_parser("control-demo", parents=[common], help="merging-controller run with phase log")
    sub.add_parser("reproduce-fig2", parents=[common], help="small-noise synchronisation experiment")
    return parser


def _threads(args) -> int:
    if args.threads is not None:
        value = args.threads
    else:
        env = os.environ.get("VICSEK_THREADS")
        if env is None:
            return resolve_workers(0)
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"VICSEK_THREADS must be an integer (got {env!r})") from None
    if value < 0:
        raise UsageError("--threads must be >= 0")
    return resolve_workers(value)


def _config(args, required: bool = True) -> ExperimentConfig:
    if args.config is None:
        if required:
            raise UsageError(f"{args.command} requires --config")
        params = SimParams(seed=0, **FIG2_PARAMS)
        cfg = ExperimentConfig(params, UniformInit(), RandomNoise(), outputs="fig2")
    else:
        cfg = load_config(args.config)
    if args.seed is not None:
        try:
            cfg = replace(cfg, params=cfg.params.replace(seed=args.seed))
        except ValueError as exc:
            raise ConfigError(f"--seed: {exc}") from None
    if args.runs is not None:
        if args.runs < 1:
            raise UsageError("--runs must be >= 1")
        cfg = replace(cfg, runs=args.runs)
    if args.out is not None:
        cfg = replace(cfg, outputs=args.out)
    return cfg


def _prefix(cfg: ExperimentConfig) -> str:
    parent = Path(cfg.outputs).parent
    parent.mkdir(parents=True, exist_ok=True)
    return cfg.outputs


def cmd_simulate(args) -> None:
    cfg = _config(args)
    prefix = _prefix(cfg)
    traj = run_trajectory(cfg.params, cfg.initializer, cfg.noise_source, 0, keep_states=args.positions)
    write_metrics_csv([traj], f"{prefix}_metrics.csv")
    if args.positions:
        write_positions_csv(traj, f"{prefix}_positions.csv")


def cmd_ensemble(args) -> None:
    cfg = _config(args)
    prefix = _prefix(cfg)
    trajs = ensemble_runs(cfg.params, cfg.runs, cfg.initializer, cfg.noise_source, _threads(args))
    summary = summarize(trajs, cfg.params.delta, cfg.tau, cfg.params.r)
    write_metrics_csv(trajs, f"{prefix}_metrics.csv")
    write_summary_csv(summary, f"{prefix}_summary.csv")
    if cfg.emit_plot:
        render_plot([(cfg.params.delta, summary)], f"{prefix}_summary.svg")
    value, se = summary.plateau()
    print(f"delta={cfg.params.delta:g} runs={cfg.runs} plateau={value:.6g} se={se:.3g}")


def cmd_sweep(args) -> None:
    cfg = _config(args)
    prefix = _prefix(cfg)
    rows = delta_sweep(cfg.params, cfg.deltas, cfg.tau, cfg.runs, cfg.initializer, _threads(args))
    write_sweep_csv(rows, f"{prefix}_sweep.csv")
    for row in rows:
        verdict = "pass" if row.passed else "fail"
        print(f"delta={row.delta:g} plateau={row.plateau:.6g} se={row.plateau_se:.3g} tau={row.tau:g} {verdict}")


def cmd_control_demo(args) -> None:
    cfg = _config(args)
    prefix = _prefix(cfg)
    params = cfg.params
    if params.delta <= 0:
        raise ConfigError("control-demo needs delta > 0")
    source = cfg.noise_source
    if not isinstance(source, ControllerNoise):
        source = ControllerNoise(epsilon=cfg.epsilon)
    traj = run_trajectory(params, cfg.initializer, source, 0)
    write_control_csv(traj, f"{prefix}_control.csv")
    eps = source.epsilon if source.epsilon is not None else params.r / 3
    hits = [int(t) for t, d in zip(traj.t, traj.d_x) if d < eps]
    print(f"first step with d_x < {eps:.6g}: {hits[0] if hits else 'not reached'}")


def cmd_reproduce_fig2(args) -> None:
    cfg = _config(args, required=False)
    prefix = _prefix(cfg)
    workers = _threads(args)
    rows = []
    for label, half in FIG2_RANGES:
        init = UniformInit(-half, half)
        series = []
        for delta in cfg.deltas:
            params = cfg.params.replace(delta=delta)
            trajs = ensemble_runs(params, cfg.runs, init, RandomNoise(params.noise_kind), workers)
            summary = summarize(trajs, delta, cfg.tau, params.r)
            write_summary_csv(summary, f"{prefix}_{label}_delta{delta:g}_summary.csv")
            series.append((delta, summary))
            value, se = summary.plateau()
            rows.append((label, delta, value, se))
        render_plot(series, f"{prefix}_{label}.svg", title=f"initial angles in [-pi/{label[2:]}, pi/{label[2:]}]")
    with open(f"{prefix}_plateaus.csv", "w", newline="\n", encoding="utf-8") as fh:
        fh.write("angle_range,delta,plateau,plateau_se,two_delta\n")
        for label, delta, value, se in rows:
            fh.write(f"{label},{delta:.17g},{value:.17g},{se:.17g},{2 * delta:.17g}\n")
    for label, delta, value, se in rows:
        print(f"{label} delta={delta:g} plateau={value:.5g} se={se:.2g} 2*delta={2 * delta:g}")


COMMANDS = {
    "simulate": cmd_simulate,
    "ensemble": cmd_ensemble,
    "sweep": cmd_sweep,
    "control-demo": cmd_control_demo,
    "reproduce-fig2": cmd_reproduce_fig2,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"vicsek: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"vicsek: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError, FloatingPointError) as exc:
        print(f"vicsek: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
