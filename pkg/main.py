import argparse
import logging
import sys
from typing import List, Optional

from config import settings
from commands import checks, graphs
from models.errors import (
    BoundExceeded, CheckerError, ClosureBudgetExceeded, NoneWithinBound, SizeLimitExceeded,
)

logger = logging.getLogger(__name__)

EXIT_USAGE = 2
EXIT_BOUND = 3

# Errors that mean "the input is fine but too large for the configured limits"
BOUND_ERRORS = (BoundExceeded, NoneWithinBound, SizeLimitExceeded, ClosureBudgetExceeded)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msocheck",
        description=f"{settings.APP_NAME} v{settings.APP_VERSION}: "
                    "MSO model checking on graphs of bounded tree- or path-width",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Log at INFO level")
    parser.add_argument("--quiet", "-q", action="store_true", help="Log errors only")
    for key in settings.OVERRIDABLE:
        parser.add_argument(f"--{key.replace('_', '-')}", type=int, dest=key, default=None)
    subparsers = parser.add_subparsers(dest="command", required=True)
    graphs.register(subparsers)
    checks.register(subparsers)
    return parser


def configure_logging(verbose: bool, quiet: bool) -> None:
    level = settings.LOG_LEVEL
    if verbose:
        level = "DEBUG" if settings.DEBUG else "INFO"
    if quiet:
        level = "ERROR"
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    settings.apply_overrides(**{key: getattr(args, key) for key in settings.OVERRIDABLE})
    try:
        return args.handler(args)
    except BOUND_ERRORS as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_BOUND
    except (CheckerError, ValueError, KeyError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
