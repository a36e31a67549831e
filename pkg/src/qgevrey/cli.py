"""Command line entry point.

Exit codes: 0 when every executed block passes, 1 when a numerical check
fails (the summary is still written), 2 for configuration problems and
hypothesis violations.
"""

import argparse
import sys

from .errors import ConfigError, HypothesisError
from .runner import DEFAULT_SEED, run_plan
from .scenario import load_scenario


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="qgevrey",
        description="Numerical laboratory for sectorial solutions of a "
                    "singularly perturbed q-difference-differential "
                    "Cauchy problem.")
    sub = parser.add_subparsers(dest="command", required=True)
    run_parser = sub.add_parser(
        "run", help="execute the run plan of a scenario file")
    run_parser.add_argument("config", help="scenario TOML file")
    run_parser.add_argument("--out", required=True,
                            help="output directory for CSVs and summary")
    run_parser.add_argument("--only", default=None, metavar="BLOCKS",
                            help="comma-separated subset of blocks to run")
    run_parser.add_argument("--threads", type=int, default=1,
                            help="worker threads for independent "
                                 "evaluations (default 1)")
    run_parser.add_argument("--seed", type=int, default=DEFAULT_SEED,
                            help="seed for the spot-check sampler")
    args = parser.parse_args(argv)

    try:
        scenario = load_scenario(args.config)
        outcomes = run_plan(scenario, args.out, only=args.only,
                            threads=args.threads, seed=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except HypothesisError as exc:
        print(f"hypothesis error: {exc}", file=sys.stderr)
        return 2

    failed = [outcome.name for outcome in outcomes if not outcome.passed]
    for name in failed:
        print(f"block {name} failed", file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
