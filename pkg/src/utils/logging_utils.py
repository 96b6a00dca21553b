"""
Logging utilities for the architecture-search engine.

Run-level records go through the `log_*` helpers, which emit one line per
record: a tag followed by a dict payload stamped with an ISO timestamp.
"""

import logging
import os
import sys
from datetime import datetime
from typing import Any, Dict, Optional, Union

DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def resolve_level(level: Union[int, str]) -> int:
    """Numeric level from a number or a name; unknown names map to INFO."""
    if isinstance(level, int):
        return level
    value = logging.getLevelName(str(level).upper())
    return value if isinstance(value, int) else logging.INFO


def setup_logger(
    name: str = "qas_engine",
    level: Union[int, str] = logging.INFO,
    log_file: Optional[str] = None,
    log_format: Optional[str] = None,
    file_level: Optional[Union[int, str]] = None,
) -> logging.Logger:
    """
    Configure a logger with a stdout handler and an optional file handler.

    Calling it again replaces the handlers installed before.

    Args:
        name: Logger name; "src" captures every module of the package
        level: Console level, as a number or a name such as "DEBUG"
        log_file: Log file path, created with its directory; console only when None
        log_format: Record format; DEFAULT_FORMAT when None
        file_level: Level of the file handler; the console level when None

    Returns:
        Configured logger instance
    """
    console_level = resolve_level(level)
    file_level = console_level if file_level is None else resolve_level(file_level)

    logger = logging.getLogger(name)
    logger.setLevel(min(console_level, file_level) if log_file else console_level)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(log_format or DEFAULT_FORMAT)
    console = logging.StreamHandler(sys.stdout)
    console.setLevel(console_level)
    console.setFormatter(formatter)
    logger.addHandler(console)

    if log_file:
        directory = os.path.dirname(log_file)
        if directory:
            os.makedirs(directory, exist_ok=True)
        to_file = logging.FileHandler(log_file, encoding="utf-8")
        to_file.setLevel(file_level)
        to_file.setFormatter(formatter)
        logger.addHandler(to_file)

    return logger


def _stamped(payload: Dict[str, Any]) -> Dict[str, Any]:
    return {"timestamp": datetime.now().isoformat(), **payload}


def log_episode(
    logger: logging.Logger,
    seed: int,
    phase: str,
    record: Dict[str, Any],
) -> None:
    """
    Log one finished episode.

    Args:
        logger: Logger instance
        seed: Seed of the run
        phase: "train" or "test"
        record: Episode log row
    """
    logger.info(f"EPISODE: {_stamped({'seed': seed, 'phase': phase, **record})}")


def log_run_event(
    logger: logging.Logger,
    event: str,
    details: Dict[str, Any],
) -> None:
    """
    Log a run-level event such as a checkpoint or a finished seed.

    Args:
        logger: Logger instance
        event: Event name (e.g. "checkpoint", "seed_done")
        details: Event details
    """
    logger.info(f"RUN_EVENT: {_stamped({'event': event, 'details': details})}")


def log_error(
    logger: logging.Logger,
    error_type: str,
    error_message: str,
    context: Optional[Dict[str, Any]] = None,
) -> None:
    """
    Log a failure with the command or run it happened in.

    Args:
        logger: Logger instance
        error_type: Exception class name
        error_message: Exception message
        context: Optional context such as the command and config path
    """
    payload = {"error_type": error_type, "error_message": error_message, "context": context or {}}
    logger.error(f"ERROR: {_stamped(payload)}")
