"""
Logging utilities for prnu_gate.

This module provides logging configuration and helper functions. Logs always go
to stderr; stdout is reserved for the JSON and CSV the commands emit.
"""

import logging
from typing import TYPE_CHECKING, Optional

from rich.console import Console
from rich.logging import RichHandler

if TYPE_CHECKING:
    from src.frames.types import FrameSequence
    from src.prnu.matcher import PceReport

LOGGER_NAME = 'prnu_gate'


def setup_logging(
    level: int = logging.INFO,
    log_file: Optional[str] = None,
    verbose: bool = False,
) -> logging.Logger:
    """Set up logging for the application.

    Args:
        level: Logging level (e.g., logging.INFO, logging.DEBUG)
        log_file: Optional file path to write logs to
        verbose: Whether to enable verbose logging

    Returns:
        Configured logger
    """
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(logging.DEBUG if verbose else level)

    for handler in logger.handlers[:]:
        logger.removeHandler(handler)

    console = Console(stderr=True)
    console_handler = RichHandler(
        console=console,
        show_path=verbose,
        show_time=True,
        markup=False,
        rich_tracebacks=True,
    )
    console_handler.setLevel(logging.DEBUG if verbose else level)
    console_handler.setFormatter(logging.Formatter('%(message)s', datefmt='%Y-%m-%d %H:%M:%S'))
    logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - %(filename)s:%(lineno)d - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        ))
        file_handler.setLevel(logging.DEBUG)
        logger.addHandler(file_handler)

    return logger


def get_logger() -> logging.Logger:
    """Get the application logger.

    Returns:
        Application logger
    """
    return logging.getLogger(LOGGER_NAME)


def log_sequence(logger: logging.Logger, seq: "FrameSequence") -> None:
    """Log a one-line summary of an ingested frame sequence at DEBUG.

    Args:
        logger: Logger to use
        seq: Sequence to summarise
    """
    if not logger.isEnabledFor(logging.DEBUG):
        return
    kinds = {}
    for frame in seq.frames:
        kinds[frame.frame_kind.value] = kinds.get(frame.frame_kind.value, 0) + 1
    logger.debug(
        f"Sequence {seq.source_id!r}: {len(seq)} frames of {seq.width}x{seq.height}, "
        f"fps={seq.declared_fps}, kinds={kinds}, short_supply={seq.short_supply}"
    )


def log_pce_report(logger: logging.Logger, label: str, report: "PceReport") -> None:
    """Log a PCE report at DEBUG.

    Args:
        logger: Logger to use
        label: What was matched (e.g. a user id)
        report: Match result
    """
    if not logger.isEnabledFor(logging.DEBUG):
        return
    logger.debug(
        f"Match {label}: pce={report.pce:.2f} peak=({report.peak_row},{report.peak_col}) "
        f"corr={report.peak_corr:.5f} threshold={report.threshold} accepted={report.accepted}"
    )


def token_hint(token: str) -> str:
    """Shorten a challenge token for log lines."""
    return token[:8] + '…'
