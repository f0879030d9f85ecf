"""
Logging configuration for the MTSS toolkit.

Library modules log through children of the ``mtss`` logger and never
print; the CLI decides where records go.
"""

import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional

APP_LOGGER = "mtss"
VERBOSITY_LEVELS = ("INFO", "DEBUG")


class LogFormatter(logging.Formatter):
    """Compact console formatter: timestamp, level, message."""

    def format(self, record):
        timestamp = datetime.fromtimestamp(record.created).strftime('%H:%M:%S')
        return f"[{timestamp}] {record.levelname} {record.getMessage()}"


def level_for_verbosity(verbose: int, default: str = "WARNING") -> str:
    """Map a repeated -v count to a level name; 0 keeps the default."""
    if verbose <= 0:
        return default
    return VERBOSITY_LEVELS[min(verbose, len(VERBOSITY_LEVELS)) - 1]


def setup_logging(
    log_level: str = "WARNING",
    log_file: Optional[Path] = None,
    console: bool = True
) -> logging.Logger:
    """
    Attach handlers to the application logger, replacing earlier ones.

    Console records go to stderr; stdout carries command output only.
    """
    logger = logging.getLogger(APP_LOGGER)
    logger.setLevel(getattr(logging, log_level.upper(), logging.WARNING))
    for handler in logger.handlers:
        handler.close()
    logger.handlers.clear()

    if console:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(LogFormatter())
        logger.addHandler(console_handler)

    if log_file:
        log_file = Path(log_file)
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        ))
        logger.addHandler(file_handler)

    return logger


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """The application logger, or its child ``mtss.<name>``."""
    if name:
        return logging.getLogger(f"{APP_LOGGER}.{name}")
    return logging.getLogger(APP_LOGGER)
