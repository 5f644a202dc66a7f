"""Logging setup for the command line entry points.

Library use of eigenbound leaves logging alone; only ``main`` functions call
:func:`configure_logging`.
"""

import logging
import os
import tempfile
from typing import Optional

from eigenbound import async_utils, utils

LOG_FORMAT = (
    "{prog}: [%(asctime)s] [%(item)s] [%(module)s:%(funcName)s] "
    "%(levelname)s - %(message)s"
)


def configure_logging(
    prog: str, logger_name: str = "eigenbound", log_file: Optional[str] = None
) -> logging.Logger:
    """Send ``logger_name`` records to stderr and to a log file.

    The level comes from ``EIGENBOUND_LOG_LEVEL``; unknown names mean INFO. The
    log file defaults to ``<logger_name>.log`` in the temp directory.
    """
    logger = logging.getLogger(logger_name)
    level = getattr(logging, utils.EnvVarConstants.LOG_LEVEL.upper(), logging.INFO)
    logger.setLevel(level)
    formatter = logging.Formatter(fmt=LOG_FORMAT.format(prog=prog))
    log_file = log_file or os.path.join(tempfile.gettempdir(), f"{logger_name}.log")
    for handler in (
        async_utils.SweepItemStreamHandler(),
        async_utils.SweepItemFileHandler(filename=log_file),
    ):
        handler.setLevel(level)
        handler.setFormatter(formatter)
        logger.addHandler(handler)
    return logger
