"""
Command line: ``run``, ``rho-star`` and ``validate``.

The JSON payload of each tool goes to stdout, logs to stderr.
"""
import argparse
import json
import logging
import sys
from typing import List, Optional

from ..config import get_settings
from ..constants import EXIT_CODES
from ..tools.experiment_tools import (
    compute_rho_star_for_config,
    run_experiment_from_config,
    validate_experiment_config,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="structrl", description="Structured-policy regret experiments on tabular MDPs"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run an experiment and write regret, summary, results and timing files")
    run.add_argument("--config", required=True)
    run.add_argument("--out", default=None, help="output directory (default: the configuration's output)")
    run.add_argument("--seeds", type=int, default=None, help="override num_seeds")
    run.add_argument("--workers", type=int, default=None, help="worker processes (default: STRUCTRL_WORKERS)")
    run.add_argument("--format", choices=("csv", "json", "all"), default="all")

    rho = commands.add_parser("rho-star", help="print the optimal gain regret is measured against")
    rho.add_argument("--config", required=True)
    rho.add_argument("--mode", choices=("structured", "full"), default=None)

    check = commands.add_parser("validate", help="validate a configuration and its MDP")
    check.add_argument("--config", required=True)
    return parser


def exit_code(payload: str) -> int:
    response = json.loads(payload)
    if response.get("success"):
        return EXIT_CODES["success"]
    return EXIT_CODES.get(response.get("error_type"), EXIT_CODES["runtime"])


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    logging.basicConfig(
        level=logging.DEBUG if settings.debug else settings.log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    if args.command == "run":
        payload = run_experiment_from_config(
            args.config,
            out_dir=args.out,
            num_seeds=args.seeds,
            workers=args.workers or settings.workers,
            fmt=args.format,
        )
    elif args.command == "rho-star":
        payload = compute_rho_star_for_config(args.config, mode=args.mode)
    else:
        payload = validate_experiment_config(args.config)

    print(payload)
    return exit_code(payload)


if __name__ == "__main__":
    sys.exit(main())
