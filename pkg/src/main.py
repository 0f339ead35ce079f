import logging
import sys
from collections.abc import Sequence

from config import load_config
from errors import ConfigError
from logger import get_logger, setup_logging
from orchestrator import EXIT_USAGE, RunOrchestrator

setup_logging()
logger = get_logger(__name__)


def main(argv: Sequence[str] | None = None) -> int:
    """
    CLI entry point.

    Returns:
        Process exit code: 0 success, 1 verification failure, 2 usage or I/O error.
    """
    try:
        config = load_config(argv)
    except ConfigError as e:
        logger.error("%s", str(e))
        return EXIT_USAGE

    if config.verbose:
        setup_logging(logging.DEBUG)

    return RunOrchestrator(config).run()


if __name__ == "__main__":
    sys.exit(main())
