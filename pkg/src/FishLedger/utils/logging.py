# src/FishLedger/utils/logging.py

import logging
import sys
from pathlib import Path
from typing import Callable, Optional, Union

PACKAGE_LOGGER = "FishLedger"
DEFAULT_FORMAT = "%(asctime)s - t=%(net_time)s - %(name)s - %(levelname)s - %(message)s"


class NetworkClockFilter(logging.Filter):
    """Stamps every record with the network clock as ``net_time``.

    Node logs interleave by network time, which in the simulator has
    nothing to do with the wall clock shown by ``asctime``.
    """

    def __init__(self):
        super().__init__()
        self.clock: Optional[Callable[[], float]] = None

    def filter(self, record: logging.LogRecord) -> bool:
        record.net_time = "-" if self.clock is None else f"{self.clock():.1f}ms"
        return True


_clock_filter = NetworkClockFilter()


def set_network_clock(clock: Optional[Callable[[], float]]) -> None:
    """Point log stamps at a network's clock; None clears it."""
    _clock_filter.clock = clock


def _resolve_level(level: Optional[Union[str, int]]) -> int:
    if level is None:
        return logging.INFO
    if isinstance(level, int):
        return level
    resolved = getattr(logging, str(level).upper(), None)
    if not isinstance(resolved, int):
        raise ValueError(f"unknown logging level {level!r}")
    return resolved


def _install(logger: logging.Logger, handler: logging.Handler, formatter: logging.Formatter) -> None:
    handler.setFormatter(formatter)
    if _clock_filter not in handler.filters:
        handler.addFilter(_clock_filter)
    logger.addHandler(handler)


def setup_logger(
    name: str = PACKAGE_LOGGER,
    level: Optional[Union[str, int]] = None,
    log_file: Optional[Union[str, Path]] = None,
    format_string: Optional[str] = None,
    date_format: Optional[str] = None,
) -> logging.Logger:
    """Configure the package logger.

    Args:
        name: Logger name
        level: Logging level (string like "INFO" or logging constant like logging.INFO)
        log_file: Optional path to an additional log file
        format_string: Optional format; ``%(net_time)s`` is always available
        date_format: Optional ``asctime`` format

    Returns:
        Configured logger instance

    Examples:
        >>> setup_logger(level="DEBUG")
        >>> setup_logger("FishLedger", level=logging.WARNING)
    """
    logger = logging.getLogger(name)
    logger.setLevel(_resolve_level(level))
    formatter = logging.Formatter(format_string or DEFAULT_FORMAT, date_format)

    if not logger.handlers:
        _install(logger, logging.StreamHandler(sys.stdout), formatter)
    else:
        for handler in logger.handlers:
            handler.setFormatter(formatter)
            if _clock_filter not in handler.filters:
                handler.addFilter(_clock_filter)

    if log_file:
        path = str(Path(log_file).resolve())
        known = {getattr(h, "baseFilename", None) for h in logger.handlers}
        if path not in known:
            _install(logger, logging.FileHandler(path), formatter)

    return logger


def get_logger(component: str) -> logging.Logger:
    """Child of the package logger; inherits its level and handlers."""
    return logging.getLogger(f"{PACKAGE_LOGGER}.{component}")
