"""Command-line entry point: ``femtoassoc run`` and ``femtoassoc oracle-check``."""
from __future__ import annotations

import argparse
import logging
import sys

from .checks import run_oracle_campaign
from .experiment import ExperimentPlan, load_plan, run_experiment
from .output import write_outputs


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="femtoassoc", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a seeded user-count sweep")
    run.add_argument("--config", help="YAML config file (defaults used when omitted)")
    run.add_argument("--access", choices=("open", "closed", "both"))
    run.add_argument("--seed", type=int, help="base seed; run r uses seed + r")
    run.add_argument("--runs", type=int)
    run.add_argument("--users", type=int, nargs="+", help="override the user-count sweep")
    run.add_argument("--out", default="results")
    run.add_argument("--format", choices=("csv", "json"), default="csv")

    check = sub.add_parser("oracle-check", help="property checks against exhaustive search")
    check.add_argument("--trials", type=int, default=200)
    check.add_argument("--max-users", type=int, default=8)
    check.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")

    if args.command == "oracle-check":
        report = run_oracle_campaign(args.trials, args.max_users, seed=args.seed)
        for name, count in report.violations.items():
            print(f"{'PASS' if count == 0 else 'FAIL'}  {name}: {count} violations / {report.trials} trials")
        return 0 if report.ok else 1

    plan = load_plan(args.config) if args.config else ExperimentPlan()
    changes = {}
    if args.access:
        changes["access"] = ("open", "closed") if args.access == "both" else (args.access,)
    if args.seed is not None:
        changes["base_seed"] = args.seed
    if args.runs is not None:
        changes["runs"] = args.runs
    if args.users:
        changes["users"] = tuple(args.users)
    if changes:
        plan = plan.replace(**changes)
    result = run_experiment(plan, progress=lambda msg: print(msg, file=sys.stderr))
    for path in write_outputs(result, args.out, args.format):
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
