import argparse
import logging
import math
import sys

from typing import Sequence

from src.cli.checks import CheckResult, registered_checks
from src.cli.config import ExperimentConfig, load_config, with_overrides
from src.cli.runner import RunOutcome, emit_profile_curve, run
from src.spectral_core.errors import ConfigError, ParameterError


logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectral-lab",
        description="Numerical checks for structurally damped wave equations.",
    )
    parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="run the checks named in a config file")
    profile_parser = commands.add_parser("profile", help="write the solution and its profile at one time")
    for sub in (run_parser, profile_parser):
        sub.add_argument("config", help="path to a JSON experiment config")
        sub.add_argument("--output-dir", default=None)
        sub.add_argument("--quad-tolerance", type=float, default=None)
    run_parser.add_argument("--parallel", action="store_true", default=None)
    profile_parser.add_argument("--t", type=float, required=True, dest="t")

    commands.add_parser("list-checks", help="print the registered check names")
    return parser


def _format(value: float, spec: str) -> str:
    return "nan" if math.isnan(value) else format(value, spec)


def _print_summary(outcome: RunOutcome) -> None:
    print("=" * 78)
    print("CHECK SUMMARY")
    print("=" * 78)
    print(f"{'check':<34}{'predicted':>11}{'fitted':>11}{'stderr':>10}{'spread':>8}  verdict")
    for result in outcome.results:
        for row in result.summary:
            print(
                f"{row.check:<34}{_format(row.predicted, '.4f'):>11}{_format(row.fitted, '.4f'):>11}"
                f"{_format(row.stderr, '.1e'):>10}{_format(row.ratio_spread, '.3f'):>8}  {row.verdict.value}"
            )
        _print_notes(result)
    print()
    print(f"Summary written to {outcome.summary_path}")


def _print_notes(result: CheckResult) -> None:
    for note in result.notes:
        print(f"    {result.name}: {note}")


def _load(args: argparse.Namespace) -> ExperimentConfig:
    config = load_config(args.config)
    return with_overrides(
        config,
        output_dir=args.output_dir,
        parallel=getattr(args, "parallel", None),
        quad_tolerance=args.quad_tolerance,
    )


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(asctime)s %(name)s %(levelname)s: %(message)s")

    if args.command == "list-checks":
        for check in registered_checks():
            print(check.name.value)
        return EXIT_PASS

    try:
        config = _load(args)
        if args.command == "profile":
            path = emit_profile_curve(config, args.t)
            print(f"Profile written to {path}")
            return EXIT_PASS
        outcome = run(config)
    except (ConfigError, ParameterError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as e:
        logger.exception("%s aborted", args.command)
        print(f"error: {args.command} aborted: {e!r}", file=sys.stderr)
        return EXIT_CONFIG

    _print_summary(outcome)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
