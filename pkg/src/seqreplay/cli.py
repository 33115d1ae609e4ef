"""Command-line entry point.

    seqreplay run --config exp.ini --out results/ --override seeds=0:3 episodes=50
    seqreplay compare --config exp.ini --out results/
    seqreplay sweep --param m_t --values 10 100 1000 --out results/
    seqreplay plot results/compare_episodes.csv --output curves.svg
    seqreplay validate-layout my_layout.txt

Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ExperimentConfig, apply_overrides, dump_config, parse_config
from .core import ConfigError
from .envs import LayoutError, default_layout_text, parse_layout
from .experiments import run_experiment, save_result, sweep, write_episode_csv, write_summary_csv
from .plotting import SchemaError, plot_curves
from .replay import Schedule

log = logging.getLogger("seqreplay")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 by default; usage errors are 1 here
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _config(args, validate: bool = True) -> ExperimentConfig:
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        config = parse_config(path.read_text(), base_dir=path.parent)
    else:
        config = ExperimentConfig()
    if args.override:
        config = apply_overrides(config, args.override)
    return config.validate() if validate else config


def cmd_run(args) -> int:
    config = _config(args, validate=False)
    out = Path(args.out)
    schedule = None
    if args.schedule and config.method in ("uniform", "prioritized"):
        schedule = Schedule.read(args.schedule)
        config = config.replace(budget_mode="schedule", schedule_path=str(args.schedule))
    config.validate()
    result = run_experiment(config, schedule=schedule, jobs=args.jobs)
    episodes, summary = save_result(result, out, stem=config.method)
    if args.schedule and config.method == "sequences":
        result.schedule().write(args.schedule)
        print(f"schedule written to {args.schedule}")
    (out / "config.ini").write_text(dump_config(config))
    print(f"G_e = {result.G_e:.1f} +- {result.G_e_stderr:.1f}, rho = {result.rho:.4f}")
    print(f"wrote {episodes} and {summary}")
    return EXIT_OK


def cmd_compare(args) -> int:
    config = _config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    methods = list(dict.fromkeys(config.methods))
    # the sequence method sets the per-episode budget the baselines must match
    order = sorted(methods, key=lambda m: m != "sequences")
    schedule = None
    results = []
    for method in order:
        run_config = config.replace(method=method)
        if method in ("uniform", "prioritized"):
            if schedule is not None:
                run_config = run_config.replace(budget_mode="schedule")
            elif run_config.budget_mode == "unlimited":
                raise ConfigError("compare without the sequences method needs budget_mode=fixed")
        elif method == "sequences" and config.budget_mode == "schedule":
            run_config = run_config.replace(budget_mode="unlimited")
        log.info("running %s", method)
        result = run_experiment(run_config, schedule=schedule, jobs=args.jobs)
        if method == "sequences":
            schedule = result.schedule()
            schedule.write(args.schedule or out / "schedule.csv")
        results.append(result)
        print(f"{method:12s} G_e = {result.G_e:9.1f} +- {result.G_e_stderr:7.1f}  rho = {result.rho:.4f}")
    episodes_path = out / "compare_episodes.csv"
    with open(episodes_path, "w", newline="") as fh:
        write_episode_csv(results, fh, with_method=True)
    with open(out / "compare_summary.csv", "w", newline="") as fh:
        write_summary_csv([r.summary_row() for r in results], fh)
    (out / "config.ini").write_text(dump_config(config))
    plot = plot_curves([episodes_path], out / "compare.svg", title=f"{config.env}: secondary task",
                       smooth=args.smooth)
    print(f"wrote {episodes_path} and {plot}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = sweep(config, args.param, args.values, jobs=args.jobs)
    summary = []
    for value, result in rows:
        save_result(result, out, stem=f"{args.param}_{value}")
        summary.append({args.param: value, **result.summary_row()})
        print(f"{args.param}={value:<6d} G_e = {result.G_e:9.1f} +- {result.G_e_stderr:7.1f}")
    with open(out / f"sweep_{args.param}.csv", "w", newline="") as fh:
        write_summary_csv(summary, fh, extra=[args.param])
    return EXIT_OK


def cmd_plot(args) -> int:
    for path in args.csv:
        if not Path(path).is_file():
            raise UsageError(f"no such file: {path}")
    out = plot_curves(args.csv, args.output, title=args.title, smooth=args.smooth)
    print(f"wrote {out}")
    return EXIT_OK


def cmd_validate_layout(args) -> int:
    if args.layout:
        path = Path(args.layout)
        if not path.is_file():
            raise UsageError(f"no such file: {path}")
        env = parse_layout(path.read_text())
    else:
        env = parse_layout(default_layout_text())
    print(env.summary())
    for warning in env.warnings:
        print(f"warning: {warning}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="seqreplay", description="Sequence replay experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def experiment_flags(p):
        p.add_argument("--config", help="INI config file; every key has a default")
        p.add_argument("--out", default="results", help="output directory")
        p.add_argument("--override", nargs="+", metavar="KEY=VALUE", default=[],
                       help="config overrides, e.g. seeds=0:3 replay.budget=500")
        p.add_argument("--jobs", type=int, default=1, help="seeds run in parallel")
        p.add_argument("--schedule", help="budget schedule CSV to record or play back")

    p = sub.add_parser("run", help="run one method")
    experiment_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="run every method at matched replay budgets")
    experiment_flags(p)
    p.add_argument("--smooth", type=int, default=1, help="moving-average width for the plot")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="vary one memory parameter")
    experiment_flags(p)
    p.add_argument("--param", required=True, choices=["m_b", "m_t", "n_v"])
    p.add_argument("--values", required=True, type=int, nargs="+")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="plot per-episode CSVs")
    p.add_argument("csv", nargs="+")
    p.add_argument("--output", default="curves.svg")
    p.add_argument("--title")
    p.add_argument("--smooth", type=int, default=1)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("validate-layout", help="check a grid layout file")
    p.add_argument("layout", nargs="?", help="layout file (default: the shipped layout)")
    p.set_defaults(func=cmd_validate_layout)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except LayoutError as exc:
        for err in exc.errors:
            print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, UsageError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
