import logging
import os
import sys

DEFAULT_LEVEL_ENV = "MOBIUSCS_LOG_LEVEL"


def setup_logging(level: int | str | None = None) -> None:
    """
    Configures the global logging settings for the project.

    Diagnostics go to stderr; stdout is reserved for data written by the CLI.
    When no level is given, MOBIUSCS_LOG_LEVEL is consulted before falling back to INFO.
    """
    if level is None:
        level = os.environ.get(DEFAULT_LEVEL_ENV, "INFO")
    if isinstance(level, str):
        level = logging.getLevelNamesMapping().get(level.upper(), logging.INFO)

    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )


def get_logger(name: str) -> logging.Logger:
    """
    Returns a logger instance for the given name.
    """
    return logging.getLogger(name)
