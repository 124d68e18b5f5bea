"""Command-line driver: single runs, sweeps, and SVG rendering.

Exit codes: 0 success, 1 configuration error (bad flags, bad config
file, invalid values), 2 I/O error. Configuration is a single JSON
object, strictly validated; flags override file values; the resolved
configuration is echoed into the output directory for provenance.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .engine import ChargePolicy, Params, RemovePolicy, run_simulation
from .report import (
    HEATMAP_METRICS,
    TRAJECTORY_FIELDS,
    TrajectoryTable,
    config_to_dict,
    read_summary,
    read_trajectories,
    render_heatmap,
    render_trajectories,
    write_summary,
    write_trajectories,
)
from .sweep import DEFAULT_GRID, SweepConfig, dense_grid, run_sweep

WORKERS_ENV = "COEVO_WORKERS"

_CONFIG_KEYS = frozenset({
    "eta", "lambda", "seed", "init_complexity", "endowment0",
    "max_generations", "max_complexity", "remove_at_min", "charge",
    "eta_grid", "lambda_grid", "runs_per_cell", "master_seed",
    "trajectory_thinning", "workers",
})


class ConfigError(Exception):
    """Invalid flags, config file, or parameter values."""


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract reserves 2 for I/O
    def error(self, message):
        raise ConfigError(f"{message}\n{self.format_usage().rstrip()}")


def _number(data, key, default, where):
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: {key} must be a number")
    return float(value)


def _integer(data, key, default, where):
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: {key} must be an integer")
    return value


def _grid(data, key, default, where):
    value = data.get(key, default)
    if value == "dense":
        return dense_grid()
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(
            f"{where}: {key} must be a non-empty list of numbers, "
            'or the string "dense"'
        )
    for item in value:
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ConfigError(f"{where}: {key} entries must be numbers")
    return tuple(float(x) for x in value)


def parse_config(path):
    """Load a config file (or defaults) into (Params, SweepConfig).

    :param path: JSON file path, or ``None`` for all defaults.
    :raises ConfigError: malformed JSON (named line/column), unknown
        keys, wrong types, or out-of-range values (named field).
    """
    where = path if path is not None else "config"
    if path is None:
        data = {}
    else:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{path}: invalid JSON at line {exc.lineno} "
                f"column {exc.colno}: {exc.msg}"
            ) from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: config root must be a JSON object")
    unknown = sorted(set(data) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"{where}: unknown config key(s): {', '.join(unknown)}")

    policy_name = data.get("remove_at_min", RemovePolicy.RESAMPLE.value)
    try:
        policy = RemovePolicy(policy_name)
    except ValueError:
        raise ConfigError(
            f"{where}: remove_at_min must be one of "
            f"{sorted(p.value for p in RemovePolicy)}, got {policy_name!r}"
        ) from None
    charge_name = data.get("charge", ChargePolicy.DEFICIT_PLUS_FUNDING.value)
    try:
        charge = ChargePolicy(charge_name)
    except ValueError:
        raise ConfigError(
            f"{where}: charge must be one of "
            f"{sorted(p.value for p in ChargePolicy)}, got {charge_name!r}"
        ) from None
    try:
        params = Params(
            eta=_number(data, "eta", 0.5, where),
            lam=_number(data, "lambda", 0.5, where),
            seed=_integer(data, "seed", 0, where),
            init_complexity=_integer(data, "init_complexity", 2, where),
            endowment0=_number(data, "endowment0", 100.0, where),
            max_generations=_integer(data, "max_generations", 10_000, where),
            max_complexity=_integer(data, "max_complexity", 10_000, where),
            remove_at_min=policy,
            charge=charge,
        )
        sweep = SweepConfig(
            eta_grid=_grid(data, "eta_grid", list(DEFAULT_GRID), where),
            lambda_grid=_grid(data, "lambda_grid", list(DEFAULT_GRID), where),
            runs_per_cell=_integer(data, "runs_per_cell", 100, where),
            master_seed=_integer(data, "master_seed", 0, where),
            base=params,
            trajectory_thinning=_integer(data, "trajectory_thinning", 1, where),
            worker_count_hint=_integer(data, "workers", 1, where),
        )
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    return params, sweep


def _replace(obj, **changes):
    try:
        return dataclasses.replace(obj, **changes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _run_overrides(params: Params, args) -> Params:
    changes = {}
    if args.eta is not None:
        changes["eta"] = args.eta
    if args.lam is not None:
        changes["lam"] = args.lam
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.max_generations is not None:
        changes["max_generations"] = args.max_generations
    return _replace(params, **changes) if changes else params


def _resolve_thin(args, sweep_cfg: SweepConfig) -> int:
    thin = args.thin if args.thin is not None else sweep_cfg.trajectory_thinning
    if thin < 1:
        raise ConfigError(f"thin must be >= 1, got {thin}")
    return thin


def _resolve_workers(args_workers, config_workers: int) -> int:
    if args_workers is not None:
        workers = args_workers
    else:
        env = os.environ.get(WORKERS_ENV)
        if env is not None and env.strip():
            try:
                workers = int(env)
            except ValueError:
                raise ConfigError(
                    f"{WORKERS_ENV} must be an integer, got {env!r}"
                ) from None
        else:
            workers = config_workers
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    return workers


def _write_echo(cfg: SweepConfig, out_dir: str) -> None:
    path = os.path.join(out_dir, "config.json")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(json.dumps(config_to_dict(cfg), indent=2) + "\n")


def _cmd_run(args) -> int:
    params, sweep_cfg = parse_config(args.config)
    params = _run_overrides(params, args)
    thin = _resolve_thin(args, sweep_cfg)
    echo = _replace(sweep_cfg, base=params, trajectory_thinning=thin)
    os.makedirs(args.out, exist_ok=True)
    _write_echo(echo, args.out)
    result = run_simulation(params, thin=thin)
    write_trajectories(TrajectoryTable.from_results([result]),
                       os.path.join(args.out, "trajectory.csv"))
    print(f"halt={result.halt.value} generations={result.generations} "
          f"final_c_t={result.final_c_t} final_c_s={result.final_c_s} "
          f"endowment={format(result.final_endowment, '.6g')}")
    return 0


def _cmd_sweep(args) -> int:
    params, cfg = parse_config(args.config)
    base = _run_overrides(params, args)
    changes = {"base": base}
    if args.eta is not None:
        changes["eta_grid"] = (args.eta,)
    if args.lam is not None:
        changes["lambda_grid"] = (args.lam,)
    if args.runs is not None:
        changes["runs_per_cell"] = args.runs
    if args.seed is not None:
        changes["master_seed"] = args.seed
    if args.thin is not None:
        changes["trajectory_thinning"] = args.thin
    changes["worker_count_hint"] = _resolve_workers(args.workers,
                                                    cfg.worker_count_hint)
    cfg = _replace(cfg, **changes)
    os.makedirs(args.out, exist_ok=True)
    _write_echo(cfg, args.out)
    results, cells = run_sweep(cfg)
    write_summary(cfg, cells, os.path.join(args.out, "summary.json"))
    write_trajectories(TrajectoryTable.from_results(results),
                       os.path.join(args.out, "trajectories.csv"))
    barrier = sum(c.barrier_fraction * c.runs for c in cells) / len(results)
    print(f"cells={len(cells)} runs={len(results)} "
          f"barrier_fraction={format(barrier, '.4g')}")
    return 0


def _cmd_plot(args) -> int:
    in_dir = args.indir
    out_dir = args.out if args.out is not None else in_dir
    os.makedirs(out_dir, exist_ok=True)
    written = []
    summary_path = os.path.join(in_dir, "summary.json")
    if os.path.exists(summary_path):
        _, cells = read_summary(summary_path)
        dest = os.path.join(out_dir, f"heatmap_{args.metric}.svg")
        try:
            render_heatmap(cells, args.metric, dest)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        written.append(dest)
    for name in ("trajectories.csv", "trajectory.csv"):
        table_path = os.path.join(in_dir, name)
        if os.path.exists(table_path):
            table = read_trajectories(table_path)
            dest = os.path.join(out_dir, f"trajectories_{args.field}.svg")
            try:
                render_trajectories(table, args.field, dest, log_y=args.log_y)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            written.append(dest)
            break
    if not written:
        raise ConfigError(
            f"{in_dir}: nothing to plot (no summary.json, trajectories.csv "
            "or trajectory.csv)"
        )
    for dest in written:
        print(f"wrote {dest}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="coevo",
        description="Co-adapting bitstring simulator: runs, sweeps, figures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", metavar="PATH", help="JSON config file")
        p.add_argument("--eta", type=float, help="technology selection strength")
        p.add_argument("--lambda", dest="lam", type=float,
                       help="goal-side selection strength")
        p.add_argument("--seed", type=int, help="seed (master seed for sweep)")
        p.add_argument("--max-generations", dest="max_generations", type=int)
        p.add_argument("--thin", type=int,
                       help="record every n-th generation")
        p.add_argument("--out", default="out", help="output directory")

    p_run = sub.add_parser("run", help="one simulation, trajectory CSV out")
    add_common(p_run)

    p_sweep = sub.add_parser("sweep", help="full grid, summary JSON + CSV out")
    add_common(p_sweep)
    p_sweep.add_argument("--runs", type=int, help="runs per grid cell")
    p_sweep.add_argument("--workers", type=int,
                         help=f"worker threads (default ${WORKERS_ENV} or config)")

    p_plot = sub.add_parser("plot", help="render SVGs from written artifacts")
    p_plot.add_argument("--in", dest="indir", default="out",
                        help="directory with summary.json / trajectory CSVs")
    p_plot.add_argument("--metric", choices=sorted(HEATMAP_METRICS),
                        default="log2_survival")
    p_plot.add_argument("--field", choices=TRAJECTORY_FIELDS, default="c_t")
    p_plot.add_argument("--log-y", dest="log_y", action="store_true",
                        help="log2-scale the trajectory y axis")
    p_plot.add_argument("--out", default=None,
                        help="output directory (default: --in)")
    return parser


_COMMANDS = {"run": _cmd_run, "sweep": _cmd_sweep, "plot": _cmd_plot}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
