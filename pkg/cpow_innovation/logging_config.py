"""Logging setup used by the command-line interface."""

import logging
from typing import Optional, Union

DEFAULT_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(
    level: Union[int, str] = logging.INFO, fmt: Optional[str] = None
) -> logging.Logger:
    """Attach a single stream handler to the package logger.

    Args:
        level: Logging level name or number
        fmt: Format string (default: ``DEFAULT_FORMAT``)

    Returns:
        The configured ``cpow_innovation`` logger
    """
    if isinstance(level, str):
        resolved = logging.getLevelName(level.upper())
        if not isinstance(resolved, int):
            raise ValueError(f"Unknown log level: {level}")
        level = resolved

    logger = logging.getLogger("cpow_innovation")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(fmt or DEFAULT_FORMAT))
    logger.addHandler(handler)
    logger.setLevel(level)
    logger.propagate = False
    return logger
