"""Root logging configuration for the command line.

Logs go to stderr so stdout carries only the JSON reports.
"""

from __future__ import annotations

import logging
import sys

from pythonjsonlogger.json import JsonFormatter

PLAIN_FORMAT = "%(levelname)s %(name)s: %(message)s"
JSON_FIELDS = "%(asctime)s %(levelname)s %(name)s %(message)s"


def configure_logging(verbose: bool = False, log_format: str = "plain") -> None:
    handler = logging.StreamHandler(sys.stderr)
    if log_format == "json":
        handler.setFormatter(JsonFormatter(JSON_FIELDS))
    else:
        handler.setFormatter(logging.Formatter(PLAIN_FORMAT))
    handler._pml_select = True
    root = logging.getLogger()
    for existing in list(root.handlers):
        if getattr(existing, "_pml_select", False):
            root.removeHandler(existing)
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if verbose else logging.WARNING)
    logging.getLogger("pml_select").setLevel(logging.DEBUG if verbose else logging.INFO)
