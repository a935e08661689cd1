"""Error codes and the exception type raised by the estimation pipeline."""

from enum import Enum
from typing import Any


class ErrorCode(str, Enum):
    """Failure and diagnostic codes."""

    EMPTY_OVERLAP = "empty_overlap"
    SERIES_TOO_SHORT = "series_too_short"
    NO_ROOT = "no_root"
    ALL_STARTS_FAILED = "all_starts_failed"
    ZERO_FILTER = "zero_filter"
    DEGENERATE_LEADING_COEFF = "degenerate_leading_coeff"
    SINGULAR_VANDERMONDE = "singular_vandermonde"
    SINGULAR_HESSIAN = "singular_hessian"
    NEGATIVE_ALPHA = "negative_alpha"
    INVALID_DISTRIBUTION = "invalid_distribution"
    INVALID_SERIES = "invalid_series"
    INVALID_FILTER = "invalid_filter"
    INVALID_CONFIG = "invalid_config"


class DeconvError(Exception):
    """Raised when an operation cannot produce a result.

    Callers branch on ``code`` rather than on the message text.
    """

    def __init__(self, code: ErrorCode, message: str, **details: Any) -> None:
        super().__init__(message)
        self.code = code
        self.message = message
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary representation."""
        return {"code": self.code.value, "message": self.message, "details": self.details}

    def __str__(self) -> str:
        return f"[{self.code.value}] {self.message}"
