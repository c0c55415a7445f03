# app/models/errors.py
"""
Exception hierarchy for the toolkit.

Every error carries a readable message plus a small `details` dict with
structural diagnostics (sizes, offending values) that the CLI can print or
attach to a report. Nothing in `details` is needed to recover; it is there so
callers can explain what went wrong without parsing the message.
"""
from __future__ import annotations

from typing import Any, Dict, Optional


class VilenkinError(Exception):
    """Base class for all toolkit errors."""

    def __init__(self, msg: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(msg)
        self.details: Dict[str, Any] = dict(details or {})

    def diagnostics(self) -> Dict[str, Any]:
        return {"error": type(self).__name__, "message": str(self), **self.details}


class InvalidParams(VilenkinError, ValueError):
    """Non-prime p, or a digit / exponent outside {0..p-1}."""


class ParamsMismatch(VilenkinError, ValueError):
    """Operands were built over different primes."""


class GridError(VilenkinError, ValueError):
    """Table size or grid shape does not fit the requested operation."""


class MaskError(VilenkinError, ValueError):
    """Mask table is not 1 at the identity, has the wrong length, or the view needs N=1."""


class NoFiniteSupport(VilenkinError):
    """The infinite product never vanishes on a shell up to the search cap."""


class InvalidElementarySpec(VilenkinError, ValueError):
    """Generator preconditions failed; details['problems'] lists each rule."""


class BudgetExceeded(VilenkinError):
    """Pattern enumeration larger than the configured budget."""


class FormatError(VilenkinError, ValueError):
    """Malformed or empty JSON / CSV payload."""
