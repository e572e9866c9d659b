# Codes By Visionnn

import logging
import sys

import config
from config import APP_NAME


def get_logger(name: str = APP_NAME) -> logging.Logger:
    """
    Returns a configured logger that writes everything to the log file and
    warnings and above to stderr.
    """
    logger = logging.getLogger(name)

    if logger.handlers:
        return logger  # Already configured

    logger.setLevel(logging.DEBUG)

    # ── File Handler (all levels) ──────────────────────────────────────────────
    try:
        config.LOG_FILE.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(config.LOG_FILE, encoding="utf-8")
    except OSError:
        file_handler = None  # read-only home; stderr still works
    if file_handler is not None:
        file_handler.setLevel(logging.DEBUG)
        file_fmt = logging.Formatter(
            fmt="%(asctime)s | %(levelname)-8s | %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
        )
        file_handler.setFormatter(file_fmt)
        logger.addHandler(file_handler)

    # ── Stderr Handler (WARNING and above only) ────────────────────────────────
    stderr_handler = logging.StreamHandler(sys.stderr)
    stderr_handler.setLevel(logging.WARNING)
    stderr_fmt = logging.Formatter(fmt="[%(levelname)s] %(message)s")
    stderr_handler.setFormatter(stderr_fmt)
    logger.addHandler(stderr_handler)

    return logger


def set_verbose(verbose: bool) -> None:
    """Lower the stderr threshold to INFO for --verbose runs."""
    for handler in log.handlers:
        if isinstance(handler, logging.StreamHandler) and not isinstance(handler, logging.FileHandler):
            handler.setLevel(logging.INFO if verbose else logging.WARNING)


# Module-level logger instance
log = get_logger()
