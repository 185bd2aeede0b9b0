"""Loguru sinks for CLI runs: colourised stderr plus a rotated run log."""

import sys
from pathlib import Path
from typing import Optional

from loguru import logger

from ..errors import ParameterError
from .config import LoggingConfig

CONSOLE_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan> - <level>{message}</level>"
)
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function}:{line} - {message}"
LEVELS = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL")


def setup_logging(
    log_file: Optional[Path] = None,
    level: Optional[str] = None,
    settings: LoggingConfig = LoggingConfig(),
) -> None:
    """
    Replace all loguru sinks.

    Args:
        log_file: Run log (rotated per ``settings``); None logs to stderr only
        level: Overrides ``settings.level`` (the ``--log-level`` flag)
        settings: The ``logging`` config section

    Raises:
        ParameterError: If the level name is not a loguru level
    """
    level = (level or settings.level).upper()
    if level not in LEVELS:
        raise ParameterError(f"Unknown log level {level!r}; expected one of {', '.join(LEVELS)}")

    logger.remove()
    logger.add(sys.stderr, format=settings.format or CONSOLE_FORMAT, level=level, colorize=True)

    if log_file:
        log_file = Path(log_file)
        log_file.parent.mkdir(parents=True, exist_ok=True)
        logger.add(
            str(log_file),
            format=FILE_FORMAT,
            level=level,
            rotation=settings.rotation,
            retention=settings.retention,
            compression=settings.compression,
        )
        logger.debug(f"Run log: {log_file}")
