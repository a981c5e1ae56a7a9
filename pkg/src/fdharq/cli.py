"""Command-line entry point.

    fdharq run <preset|config.json> [--backend analytic|mc|both] [--trials N]
               [--seed S] [--out DIR] [--redraw reuse|fresh|mixed] [--exact-mi]
    fdharq list
    fdharq schedule --processes N --horizon H

The exit status is nonzero only for configuration errors. Numerical trouble
at a single grid point is written into that row's ``error`` column.
"""

from __future__ import annotations

import argparse
import sys

from . import experiments, timeline
from .config import ConfigError

EXIT_CONFIG = 2
_BACKEND_ALIASES = {"analytic": "analytic", "mc": "montecarlo", "montecarlo": "montecarlo",
                    "both": "both"}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fdharq", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a preset or an experiment file")
    run.add_argument("target", help="preset name (see 'list') or JSON experiment file")
    run.add_argument("--backend", choices=sorted(_BACKEND_ALIASES))
    run.add_argument("--trials", type=int, help="Monte Carlo trials per grid point")
    run.add_argument("--seed", type=int)
    run.add_argument("--out", default="results", help="output directory (default: results)")
    run.add_argument("--redraw", choices=("reuse", "fresh", "mixed"))
    run.add_argument("--coupling", choices=("joint", "independent"))
    run.add_argument("--exact-mi", action="store_true",
                     help="decide Phase I on the exact per-tone mutual information")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--quiet", action="store_true")

    sub.add_parser("list", help="list the built-in presets")

    sch = sub.add_parser("schedule", help="print a multi-process HARQ schedule as CSV")
    sch.add_argument("--processes", type=int, default=4)
    sch.add_argument("--horizon", type=int, default=8)
    sch.add_argument("--retransmitter", choices=("relay", "source"), default="relay")
    return ap


def _overrides(args) -> dict:
    changes = {}
    if args.backend:
        changes["backend"] = _BACKEND_ALIASES[args.backend]
    if args.trials is not None:
        changes["n_trials"] = args.trials
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.redraw:
        changes["redraw"] = args.redraw
    if args.coupling:
        changes["coupling"] = args.coupling
    if args.exact_mi:
        changes["exact_mi"] = True
    return changes


def _run(args) -> int:
    exp = experiments.load_experiment(args.target).with_(**_overrides(args))
    experiments.check_experiment(exp)
    if args.workers < 1:
        raise ConfigError("--workers must be at least 1")
    rows = experiments.run_experiment(exp, workers=args.workers)
    csv_path, json_path = experiments.write_outputs(exp, rows, args.out)
    if not args.quiet:
        failed = sum(1 for r in rows if r["error"])
        print(f"{exp.name}: {len(rows)} rows -> {csv_path} (+ {json_path.name})")
        if failed:
            print(f"{failed} rows carry numerical errors; see the 'error' column")
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "list":
            for name, exp in experiments.builtin_figures().items():
                print(f"{name:6s} {exp.kind:7s} sweep={exp.sweep_variable:9s} {exp.description}")
            return 0
        if args.command == "schedule":
            model = timeline.RttModel()
            try:
                entries = timeline.multiprocess_schedule(model, args.processes, args.horizon,
                                                         retransmitter=args.retransmitter)
            except (timeline.ScheduleConflict, ValueError) as exc:
                raise ConfigError(str(exc)) from None
            sys.stdout.write(timeline.schedule_to_csv(entries))
            return 0
        return _run(args)
    except ConfigError as exc:
        print(f"fdharq: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
