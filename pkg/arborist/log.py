#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

"""
Logging setup for the command line interface.

Library modules only ever call ``logging.getLogger(__name__)``; handlers are
attached here, once, by the entry point.
"""

import logging
import os
import typing as t


LOG_LEVEL_VARIABLE = "ARBORIST_LOG_LEVEL"
LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s: %(message)s"


def configure_logging(level: t.Optional[str] = None) -> logging.Logger:
    """Attach a stderr handler to the ``arborist`` logger.

    The level is taken from ``level`` if given, otherwise from the
    ``ARBORIST_LOG_LEVEL`` environment variable, otherwise ``WARNING``.
    Calling this twice does not add a second handler.

    Args:
        level: logging level name, e.g. ``"DEBUG"``

    Returns:
        the configured package logger
    """
    name = (level or os.environ.get(LOG_LEVEL_VARIABLE) or "WARNING").upper()
    numeric = logging.getLevelName(name)
    if not isinstance(numeric, int):
        numeric = logging.WARNING
    logger = logging.getLogger("arborist")
    logger.setLevel(numeric)
    if not any(getattr(h, "_arborist", False) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._arborist = True  # type: ignore[attr-defined]
        logger.addHandler(handler)
    return logger
